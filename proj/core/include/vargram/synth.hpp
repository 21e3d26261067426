#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vargram/context_tree.hpp"
#include "vargram/corpus.hpp"

namespace vargram {

// Planted model for generating verification corpora: a token is produced by
// drawing a topic from the document's theta row, then a symbol from the
// phi row of (deepest matching context, topic).
struct SynthSpec {
  Alphabet alphabet = Alphabet::generic(2);
  ContextTree tree{2};
  int topics = 1;
  // One row per document pattern; document d uses row d % theta.size().
  std::vector<std::vector<double>> theta;
  // phi[node][topic][symbol].
  std::vector<std::vector<std::vector<double>>> phi;
  int n_docs = 0;
  // Document d has doc_lens[d % doc_lens.size()] tokens.
  std::vector<int> doc_lens;
  std::uint64_t seed = 0;
  std::string id_prefix = "synth";
};

// Validates the probability rows (each must sum to 1 within 1e-9) and
// generates the corpus deterministically from spec.seed.
Corpus synth_corpus(const SynthSpec& spec);

SynthSpec load_synth_spec(std::istream& in);
void save_synth_spec(const SynthSpec& spec, std::ostream& out);

}  // namespace vargram
