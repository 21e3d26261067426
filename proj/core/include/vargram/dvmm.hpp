#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vargram/context_tree.hpp"
#include "vargram/corpus.hpp"

namespace vargram {

// Variable-length Markov model with hierarchical Dirichlet smoothing: each
// context node carries a count vector, and its predictive distribution
// shrinks toward the parent's predictive distribution with strength beta.
// Counts are reals so fractional test-time updates can reuse the model.
class DvmmModel {
 public:
  // Empty root_measure means uniform over the alphabet.
  DvmmModel(ContextTree tree, double beta, std::vector<double> root_measure = {});

  // Counts every token at its deepest matching node and all ancestors.
  static DvmmModel fit(const ContextTree& tree, const Corpus& corpus, double beta,
                       std::vector<double> root_measure = {});

  const ContextTree& tree() const { return tree_; }
  double beta() const { return beta_; }
  const std::vector<double>& root_measure() const { return root_measure_; }

  double count(int node, int symbol) const {
    return counts_[static_cast<std::size_t>(node)][static_cast<std::size_t>(symbol)];
  }
  double node_total(int node) const { return totals_[static_cast<std::size_t>(node)]; }

  // Adds `amount` at the node and every ancestor up to the root.
  void observe(int node, int symbol, double amount = 1.0);

  // Replaces the per-node count table (one row per node, W entries each);
  // node totals are recomputed. No propagation is applied: rows are taken
  // as the already-accumulated per-node counts.
  void set_counts(std::vector<std::vector<double>> counts);

  // Posterior-mean distribution at a node: the root shrinks toward the
  // root measure, every other node toward its parent's distribution.
  std::vector<double> predictive(int node) const;

  // Single component of predictive(node); O(depth) instead of O(depth*W).
  double predictive_component(int node, int symbol) const;

  // predictive() at the deepest node matching the history.
  std::vector<double> next_step_dist(std::span<const int> history) const;

  // Sum over positions of ln p(token | preceding tokens), counts untouched.
  double log_likelihood(const Document& doc) const;

  // Per-position ln p values (same quantities log_likelihood sums).
  std::vector<double> step_log_likelihoods(const Document& doc) const;

  Document sample(int length, std::uint64_t seed, std::string id = "sample") const;

 private:
  ContextTree tree_;
  double beta_;
  std::vector<double> root_measure_;
  std::vector<std::vector<double>> counts_;  // [node][symbol]
  std::vector<double> totals_;               // [node]
};

}  // namespace vargram
