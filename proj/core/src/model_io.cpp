#include "vargram/model_io.hpp"

#include <istream>
#include <ostream>

#include "json_io.hpp"

namespace vargram {

namespace detail {

nlohmann::json tree_to_json(const ContextTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes())
    nodes.push_back({{"id", n.id}, {"parent", n.parent}, {"symbol", n.symbol}, {"depth", n.depth}});
  return nodes;
}

ContextTree tree_from_json(const nlohmann::json& j, int alphabet_size) {
  if (!j.is_array() || j.empty()) throw DataError("tree node list must be a non-empty array");
  ContextTree tree(alphabet_size);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    const int id = require<int>(row, "id");
    const int parent = require<int>(row, "parent");
    const int symbol = require<int>(row, "symbol");
    const int depth = require<int>(row, "depth");
    if (id != static_cast<int>(i)) throw DataError("tree node ids must be 0..n-1 in order");
    if (i == 0) {
      if (parent != -1 || depth != 0) throw DataError("tree node 0 must be the root");
      continue;
    }
    if (parent < 0 || parent >= static_cast<int>(i))
      throw DataError("tree node parent must precede the node");
    const int added = tree.add_child(parent, symbol);
    if (tree.node(added).depth != depth) throw DataError("tree node depth is inconsistent");
  }
  tree.finalize();
  return tree;
}

nlohmann::json parse_json(std::istream& in, const char* what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("cannot parse ") + what + ": " + e.what());
  }
}

}  // namespace detail

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return {{"family", std::string(family_name(c.family))},
          {"depth", c.depth},
          {"threshold", c.threshold},
          {"topics", c.topics},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"s", c.s},
          {"sweeps", c.sweeps},
          {"burn_in", c.burn_in},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.family = parse_family(detail::require<std::string>(j, "family"));
  c.depth = detail::require<int>(j, "depth");
  c.threshold = detail::require<double>(j, "threshold");
  c.topics = detail::require<int>(j, "topics");
  c.alpha = detail::require<double>(j, "alpha");
  c.beta = detail::require<double>(j, "beta");
  c.s = detail::require<int>(j, "s");
  c.sweeps = detail::require<int>(j, "sweeps");
  c.burn_in = detail::require<int>(j, "burn_in");
  c.seed = detail::require<std::uint64_t>(j, "seed");
  return c;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  json j;
  j["format"] = "vargram-model";
  j["version"] = 1;
  j["config"] = config_to_json(model.config);
  j["alphabet"] = model.alphabet.symbols();
  j["tree"] = detail::tree_to_json(model.tree());
  j["trace"] = model.trace;
  if (model.is_topic()) {
    const TopicModel& tm = model.topic();
    j["kind"] = "topic";
    j["topic_prior"] = tm.topic_prior();
    j["root_measure"] = tm.root_measure();
    const int C = tm.tree().size();
    std::vector<double> wc;
    wc.reserve(static_cast<std::size_t>(C) * static_cast<std::size_t>(tm.topics()) *
               static_cast<std::size_t>(tm.alphabet_size()));
    std::vector<double> ntt;
    for (int n = 0; n < C; ++n) {
      for (int k = 0; k < tm.topics(); ++k) {
        ntt.push_back(tm.node_topic_total(n, k));
        for (int w = 0; w < tm.alphabet_size(); ++w) wc.push_back(tm.word_count(n, k, w));
      }
    }
    j["word_counts"] = wc;
    j["node_topic_totals"] = ntt;
    j["doc_ids"] = tm.doc_ids();
    std::vector<double> dt;
    std::vector<double> dtot;
    for (int d = 0; d < tm.n_docs(); ++d) {
      dtot.push_back(tm.doc_total(d));
      for (int k = 0; k < tm.topics(); ++k) dt.push_back(tm.doc_topic(d, k));
    }
    j["doc_topic"] = dt;
    j["doc_totals"] = dtot;
    j["z"] = tm.assignments();
  } else {
    const DvmmModel& dm = model.dvmm();
    j["kind"] = "dvmm";
    j["root_measure"] = dm.root_measure();
    std::vector<std::vector<double>> counts;
    counts.reserve(static_cast<std::size_t>(dm.tree().size()));
    for (int n = 0; n < dm.tree().size(); ++n) {
      std::vector<double> row;
      row.reserve(static_cast<std::size_t>(dm.tree().alphabet_size()));
      for (int w = 0; w < dm.tree().alphabet_size(); ++w) row.push_back(dm.count(n, w));
      counts.push_back(std::move(row));
    }
    j["counts"] = counts;
  }
  out << j.dump(2) << '\n';
}

TrainedModel load_model(std::istream& in) {
  const json j = detail::parse_json(in, "model file");
  if (detail::require<std::string>(j, "format") != "vargram-model")
    throw DataError("not a model file");
  if (!j.contains("config")) throw DataError("missing field 'config'");
  const ModelConfig config = config_from_json(j.at("config"));
  Alphabet alphabet(detail::require<std::vector<std::string>>(j, "alphabet"));
  if (!j.contains("tree")) throw DataError("missing field 'tree'");
  ContextTree tree = detail::tree_from_json(j.at("tree"), alphabet.size());
  const std::string kind = detail::require<std::string>(j, "kind");
  std::vector<double> trace = detail::require<std::vector<double>>(j, "trace");

  if (kind == "topic") {
    Hyperparams hyper;
    hyper.topics = config.topics;
    hyper.alpha = config.alpha;
    hyper.beta = config.beta;
    hyper.topic_prior = detail::require<std::vector<double>>(j, "topic_prior");
    hyper.root_measure = detail::require<std::vector<double>>(j, "root_measure");
    TopicModel model(std::move(tree), hyper);
    model.restore(detail::require<std::vector<std::string>>(j, "doc_ids"),
                  detail::require<std::vector<std::vector<int>>>(j, "z"),
                  detail::require<std::vector<double>>(j, "word_counts"),
                  detail::require<std::vector<double>>(j, "node_topic_totals"),
                  detail::require<std::vector<double>>(j, "doc_topic"),
                  detail::require<std::vector<double>>(j, "doc_totals"));
    return TrainedModel{config, std::move(alphabet), std::move(model), std::move(trace)};
  }
  if (kind != "dvmm") throw DataError("unknown model kind '" + kind + "'");
  DvmmModel model(std::move(tree), config.beta,
                  detail::require<std::vector<double>>(j, "root_measure"));
  model.set_counts(detail::require<std::vector<std::vector<double>>>(j, "counts"));
  return TrainedModel{config, std::move(alphabet), std::move(model), std::move(trace)};
}

}  // namespace vargram
