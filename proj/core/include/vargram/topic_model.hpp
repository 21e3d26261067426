#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vargram/context_tree.hpp"
#include "vargram/corpus.hpp"
#include "vargram/rng.hpp"

namespace vargram {

struct Hyperparams {
  int topics = 1;
  double alpha = 1.0;
  double beta = 1.0;
  // Topic-prior measure n over topics; empty means uniform.
  std::vector<double> topic_prior;
  // Root word measure m_0 over the alphabet, shared by all topics; empty
  // means uniform.
  std::vector<double> root_measure;
};

// Topic mixture over context-tree word models, trained by collapsed Gibbs
// sampling on token-topic assignments.  Word counts are kept per
// (node, topic) with ancestor propagation: a token counts at its prediction
// node and every node above it, which is what makes the parent-recursive
// topic measures well-defined from one set of counts.
class TopicModel {
 public:
  TopicModel(ContextTree tree, Hyperparams hyper);

  // Binds a training corpus: assigns every token a uniform-random topic and
  // rebuilds all counts from those assignments.
  void init(const Corpus& corpus, std::uint64_t seed);

  // One full Gibbs pass over all tokens in document/position order.
  // Returns the joint log-probability after the pass.
  double sweep();

  // Runs `sweeps` passes, returning the per-sweep joint log-prob trace.
  std::vector<double> train(int sweeps);

  // Leave-one-out topic conditional for token (d, t); the state is
  // restored before returning.
  std::vector<double> gibbs_conditional(int d, std::size_t t);

  // Collapsed joint log-probability of (tokens, z) under current counts,
  // with node measures evaluated recursively from the current counts.
  double joint_log_prob() const;

  // True when maintained counts equal a from-scratch rebuild from z.
  bool counts_consistent() const;

  // Posterior-mean parameters.
  std::vector<double> theta_hat(int d) const;
  std::vector<double> topic_measure(int node, int k) const;
  double topic_measure_component(int node, int k, int w) const;
  std::vector<double> phi_hat(int node, int k) const;
  double phi_hat_component(int node, int k, int w) const;

  // Next-step scoring of a held-out document; returns per-position ln p.
  // Topics are Monte-Carlo sampled (s per step) from a running theta
  // estimate that starts at the prior mean.  predict_s2 additionally feeds
  // each scored token back as fractional per-topic word counts on a
  // call-local copy of the count tables.
  std::vector<double> predict_s1(const Document& doc, int s, std::uint64_t seed) const;
  std::vector<double> predict_s2(const Document& doc, int s, std::uint64_t seed) const;

  // Generation. Prior mode draws each topic from a Polya urn started at
  // alpha * n; given-z mode uses a fixed allocation sequence.
  Document generate_prior(int length, std::uint64_t seed, std::string id = "sample") const;
  Document generate_given_z(std::span<const int> z_alloc, std::uint64_t seed,
                            std::string id = "sample") const;

  // Gibbs pass over a held-out document against frozen training counts
  // (the document's own contributions live on a call-local overlay).
  // Returns the final topic allocation.
  std::vector<int> fold_in(const Document& doc, int sweeps, std::uint64_t seed) const;

  const ContextTree& tree() const { return tree_; }
  int topics() const { return K_; }
  int alphabet_size() const { return W_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<double>& topic_prior() const { return topic_prior_; }
  const std::vector<double>& root_measure() const { return root_measure_; }
  int n_docs() const { return static_cast<int>(doc_ids_.size()); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::vector<int>>& assignments() const { return z_; }

  double word_count(int node, int k, int w) const { return word_counts_[word_index(node, k, w)]; }
  double node_topic_total(int node, int k) const {
    return node_topic_totals_[static_cast<std::size_t>(node) * static_cast<std::size_t>(K_) +
                              static_cast<std::size_t>(k)];
  }
  double doc_topic(int d, int k) const {
    return doc_topic_[static_cast<std::size_t>(d) * static_cast<std::size_t>(K_) +
                      static_cast<std::size_t>(k)];
  }
  double doc_total(int d) const { return doc_totals_[static_cast<std::size_t>(d)]; }

  // Restores a deserialized training state (tokens are not part of the
  // model file, so a restored model scores and generates but cannot be
  // swept further).
  void restore(std::vector<std::string> doc_ids, std::vector<std::vector<int>> z,
               std::vector<double> word_counts, std::vector<double> node_topic_totals,
               std::vector<double> doc_topic, std::vector<double> doc_totals);

 private:
  std::size_t word_index(int node, int k, int w) const {
    return (static_cast<std::size_t>(node) * static_cast<std::size_t>(K_) +
            static_cast<std::size_t>(k)) *
               static_cast<std::size_t>(W_) +
           static_cast<std::size_t>(w);
  }
  void remove_token(int d, int node, int w, int k);
  void add_token(int d, int node, int w, int k);
  // Unnormalized topic weights for token w at prediction node j in doc d,
  // evaluated on whatever the count tables currently hold.
  void topic_weights(int d, int node, int w, std::vector<double>& out) const;

  ContextTree tree_;
  int K_;
  int W_;
  double alpha_;
  double beta_;
  std::vector<double> topic_prior_;
  std::vector<double> root_measure_;

  std::vector<std::string> doc_ids_;
  std::vector<std::vector<int>> tokens_;
  std::vector<std::vector<int>> pred_node_;
  std::vector<std::vector<int>> z_;

  std::vector<double> word_counts_;        // [(node, topic, word)]
  std::vector<double> node_topic_totals_;  // [(node, topic)]
  std::vector<double> doc_topic_;          // [(doc, topic)]
  std::vector<double> doc_totals_;         // [doc]

  Rng rng_{0};
};

}  // namespace vargram
