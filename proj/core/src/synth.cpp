#include "vargram/synth.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "json_io.hpp"
#include "vargram/errors.hpp"
#include "vargram/rng.hpp"

namespace vargram {

namespace {

void check_row(const std::vector<double>& row, std::size_t want, const char* what) {
  if (row.size() != want)
    throw NumericError(std::string(what) + " row has wrong length");
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) throw NumericError(std::string(what) + " row has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw NumericError(std::string(what) + " row does not sum to 1 within 1e-9");
}

}  // namespace

Corpus synth_corpus(const SynthSpec& spec) {
  if (spec.topics < 1) throw NumericError("synth spec needs at least one topic");
  if (spec.n_docs < 0) throw NumericError("synth spec has negative document count");
  if (spec.n_docs > 0 && (spec.theta.empty() || spec.doc_lens.empty()))
    throw NumericError("synth spec needs theta rows and document lengths");
  if (spec.tree.alphabet_size() != spec.alphabet.size())
    throw DataError("synth tree alphabet size differs from the alphabet");
  const std::size_t K = static_cast<std::size_t>(spec.topics);
  const std::size_t W = static_cast<std::size_t>(spec.alphabet.size());
  for (const auto& row : spec.theta) check_row(row, K, "theta");
  if (spec.phi.size() != static_cast<std::size_t>(spec.tree.size()))
    throw NumericError("phi must have one block per tree node");
  for (const auto& block : spec.phi) {
    if (block.size() != K) throw NumericError("phi block has wrong topic count");
    for (const auto& row : block) check_row(row, W, "phi");
  }
  for (int len : spec.doc_lens)
    if (len < 0) throw NumericError("synth spec has a negative document length");

  std::vector<Document> docs;
  docs.reserve(static_cast<std::size_t>(spec.n_docs));
  for (int d = 0; d < spec.n_docs; ++d) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(d)));
    const auto& theta = spec.theta[static_cast<std::size_t>(d) % spec.theta.size()];
    const int len = spec.doc_lens[static_cast<std::size_t>(d) % spec.doc_lens.size()];
    Document doc;
    doc.id = spec.id_prefix + "_" + std::to_string(d);
    doc.tokens.reserve(static_cast<std::size_t>(len));
    for (int t = 0; t < len; ++t) {
      const int z = rng.categorical(theta);
      const int j = spec.tree.lookup(doc.tokens, static_cast<std::size_t>(t));
      const int w = rng.categorical(spec.phi[static_cast<std::size_t>(j)][static_cast<std::size_t>(z)]);
      doc.tokens.push_back(w);
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(spec.alphabet, std::move(docs));
}

SynthSpec load_synth_spec(std::istream& in) {
  const nlohmann::json j = detail::parse_json(in, "synth spec");
  SynthSpec spec;
  spec.alphabet = Alphabet(detail::require<std::vector<std::string>>(j, "alphabet"));
  spec.tree = detail::tree_from_json(j.at("tree"), spec.alphabet.size());
  spec.topics = detail::require<int>(j, "topics");
  spec.theta = detail::require<std::vector<std::vector<double>>>(j, "theta");
  spec.phi = detail::require<std::vector<std::vector<std::vector<double>>>>(j, "phi");
  spec.n_docs = detail::require<int>(j, "n_docs");
  spec.doc_lens = detail::require<std::vector<int>>(j, "doc_lens");
  spec.seed = detail::require<std::uint64_t>(j, "seed");
  if (j.contains("id_prefix")) spec.id_prefix = j.at("id_prefix").get<std::string>();
  return spec;
}

void save_synth_spec(const SynthSpec& spec, std::ostream& out) {
  nlohmann::json j;
  j["format"] = "vargram-synth";
  j["version"] = 1;
  j["alphabet"] = spec.alphabet.symbols();
  j["tree"] = detail::tree_to_json(spec.tree);
  j["topics"] = spec.topics;
  j["theta"] = spec.theta;
  j["phi"] = spec.phi;
  j["n_docs"] = spec.n_docs;
  j["doc_lens"] = spec.doc_lens;
  j["seed"] = spec.seed;
  j["id_prefix"] = spec.id_prefix;
  out << j.dump(2) << '\n';
}

}  // namespace vargram
