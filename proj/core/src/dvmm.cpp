#include "vargram/dvmm.hpp"

#include <cmath>

#include "vargram/errors.hpp"
#include "vargram/rng.hpp"

namespace vargram {

DvmmModel::DvmmModel(ContextTree tree, double beta, std::vector<double> root_measure)
    : tree_(std::move(tree)), beta_(beta), root_measure_(std::move(root_measure)) {
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw UsageError("beta must be positive and finite");
  const std::size_t W = static_cast<std::size_t>(tree_.alphabet_size());
  if (root_measure_.empty()) {
    root_measure_.assign(W, 1.0 / static_cast<double>(W));
  } else {
    if (root_measure_.size() != W) throw NumericError("root measure has wrong length");
    double sum = 0.0;
    for (double v : root_measure_) {
      if (!(v >= 0.0)) throw NumericError("root measure has a negative or NaN entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw NumericError("root measure does not sum to 1");
  }
  counts_.assign(static_cast<std::size_t>(tree_.size()), std::vector<double>(W, 0.0));
  totals_.assign(static_cast<std::size_t>(tree_.size()), 0.0);
}

DvmmModel DvmmModel::fit(const ContextTree& tree, const Corpus& corpus, double beta,
                         std::vector<double> root_measure) {
  if (tree.alphabet_size() != corpus.alphabet().size())
    throw DataError("tree alphabet size differs from corpus alphabet");
  DvmmModel model(tree, beta, std::move(root_measure));
  for (const auto& doc : corpus.documents()) {
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      const int j = model.tree_.lookup(doc.tokens, t);
      model.observe(j, doc.tokens[t], 1.0);
    }
  }
  return model;
}

void DvmmModel::set_counts(std::vector<std::vector<double>> counts) {
  if (counts.size() != static_cast<std::size_t>(tree_.size()))
    throw DataError("count table must have one row per tree node");
  for (const auto& row : counts) {
    if (row.size() != static_cast<std::size_t>(tree_.alphabet_size()))
      throw DataError("count row has wrong length");
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("counts must be finite and >= 0");
  }
  counts_ = std::move(counts);
  for (std::size_t n = 0; n < counts_.size(); ++n) {
    double total = 0.0;
    for (double v : counts_[n]) total += v;
    totals_[n] = total;
  }
}

void DvmmModel::observe(int node, int symbol, double amount) {
  for (int n : tree_.path_to_root(node)) {
    counts_[static_cast<std::size_t>(n)][static_cast<std::size_t>(symbol)] += amount;
    totals_[static_cast<std::size_t>(n)] += amount;
  }
}

std::vector<double> DvmmModel::predictive(int node) const {
  std::vector<double> p = root_measure_;
  const auto& path = tree_.path_to_root(node);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const std::size_t n = static_cast<std::size_t>(*it);
    const double denom = totals_[n] + beta_;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (counts_[n][i] + beta_ * p[i]) / denom;
  }
  return p;
}

double DvmmModel::predictive_component(int node, int symbol) const {
  double p = root_measure_[static_cast<std::size_t>(symbol)];
  const auto& path = tree_.path_to_root(node);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const std::size_t n = static_cast<std::size_t>(*it);
    p = (counts_[n][static_cast<std::size_t>(symbol)] + beta_ * p) / (totals_[n] + beta_);
  }
  return p;
}

std::vector<double> DvmmModel::next_step_dist(std::span<const int> history) const {
  return predictive(tree_.lookup(history, history.size()));
}

double DvmmModel::log_likelihood(const Document& doc) const {
  double total = 0.0;
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const int j = tree_.lookup(doc.tokens, t);
    total += std::log(predictive_component(j, doc.tokens[t]));
  }
  return total;
}

std::vector<double> DvmmModel::step_log_likelihoods(const Document& doc) const {
  std::vector<double> steps;
  steps.reserve(doc.tokens.size());
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const int j = tree_.lookup(doc.tokens, t);
    steps.push_back(std::log(predictive_component(j, doc.tokens[t])));
  }
  return steps;
}

Document DvmmModel::sample(int length, std::uint64_t seed, std::string id) const {
  if (length < 0) throw UsageError("sample length must be >= 0");
  Rng rng(seed);
  Document doc;
  doc.id = std::move(id);
  doc.tokens.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    const int j = tree_.lookup(doc.tokens, static_cast<std::size_t>(t));
    doc.tokens.push_back(rng.categorical(predictive(j)));
  }
  return doc;
}

}  // namespace vargram
