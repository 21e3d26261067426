#include "vargram/topic_model.hpp"

#include <algorithm>
#include <cmath>

#include "vargram/errors.hpp"
#include "vargram/numerics.hpp"

namespace vargram {

namespace {

std::vector<double> resolve_measure(std::vector<double> v, std::size_t want, const char* what) {
  if (v.empty()) return std::vector<double>(want, 1.0 / static_cast<double>(want));
  if (v.size() != want) throw NumericError(std::string(what) + " has wrong length");
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw NumericError(std::string(what) + " has a negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw NumericError(std::string(what) + " does not sum to 1");
  return v;
}

}  // namespace

TopicModel::TopicModel(ContextTree tree, Hyperparams hyper)
    : tree_(std::move(tree)),
      K_(hyper.topics),
      W_(tree_.alphabet_size()),
      alpha_(hyper.alpha),
      beta_(hyper.beta) {
  if (K_ < 1) throw UsageError("topics must be >= 1");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw UsageError("alpha must be positive and finite");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw UsageError("beta must be positive and finite");
  topic_prior_ = resolve_measure(std::move(hyper.topic_prior), static_cast<std::size_t>(K_),
                                 "topic prior");
  root_measure_ = resolve_measure(std::move(hyper.root_measure), static_cast<std::size_t>(W_),
                                  "root measure");
  word_counts_.assign(static_cast<std::size_t>(tree_.size()) * static_cast<std::size_t>(K_) *
                          static_cast<std::size_t>(W_),
                      0.0);
  node_topic_totals_.assign(static_cast<std::size_t>(tree_.size()) * static_cast<std::size_t>(K_),
                            0.0);
}

void TopicModel::init(const Corpus& corpus, std::uint64_t seed) {
  if (corpus.alphabet().size() != W_) throw DataError("corpus alphabet size differs from the tree");
  rng_ = Rng(seed);
  const std::size_t D = corpus.size();
  doc_ids_.clear();
  tokens_.assign(D, {});
  pred_node_.assign(D, {});
  z_.assign(D, {});
  doc_topic_.assign(D * static_cast<std::size_t>(K_), 0.0);
  doc_totals_.assign(D, 0.0);
  std::fill(word_counts_.begin(), word_counts_.end(), 0.0);
  std::fill(node_topic_totals_.begin(), node_topic_totals_.end(), 0.0);

  for (std::size_t d = 0; d < D; ++d) {
    const auto& doc = corpus.documents()[d];
    doc_ids_.push_back(doc.id);
    tokens_[d] = doc.tokens;
    pred_node_[d].resize(doc.tokens.size());
    z_[d].resize(doc.tokens.size());
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      pred_node_[d][t] = tree_.lookup(doc.tokens, t);
      const int k = rng_.uniform_int(K_);
      z_[d][t] = k;
      add_token(static_cast<int>(d), pred_node_[d][t], doc.tokens[t], k);
    }
  }
}

void TopicModel::remove_token(int d, int node, int w, int k) {
  for (int n : tree_.path_to_root(node)) {
    word_counts_[word_index(n, k, w)] -= 1.0;
    node_topic_totals_[static_cast<std::size_t>(n) * static_cast<std::size_t>(K_) +
                       static_cast<std::size_t>(k)] -= 1.0;
  }
  doc_topic_[static_cast<std::size_t>(d) * static_cast<std::size_t>(K_) +
             static_cast<std::size_t>(k)] -= 1.0;
  doc_totals_[static_cast<std::size_t>(d)] -= 1.0;
}

void TopicModel::add_token(int d, int node, int w, int k) {
  for (int n : tree_.path_to_root(node)) {
    word_counts_[word_index(n, k, w)] += 1.0;
    node_topic_totals_[static_cast<std::size_t>(n) * static_cast<std::size_t>(K_) +
                       static_cast<std::size_t>(k)] += 1.0;
  }
  doc_topic_[static_cast<std::size_t>(d) * static_cast<std::size_t>(K_) +
             static_cast<std::size_t>(k)] += 1.0;
  doc_totals_[static_cast<std::size_t>(d)] += 1.0;
}

void TopicModel::topic_weights(int d, int node, int w, std::vector<double>& out) const {
  const auto& path = tree_.path_to_root(node);
  for (int k = 0; k < K_; ++k) {
    double p = root_measure_[static_cast<std::size_t>(w)];
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const std::size_t nk = static_cast<std::size_t>(*it) * static_cast<std::size_t>(K_) +
                             static_cast<std::size_t>(k);
      p = (word_counts_[nk * static_cast<std::size_t>(W_) + static_cast<std::size_t>(w)] +
           beta_ * p) /
          (node_topic_totals_[nk] + beta_);
    }
    out[static_cast<std::size_t>(k)] =
        p * (doc_topic_[static_cast<std::size_t>(d) * static_cast<std::size_t>(K_) +
                        static_cast<std::size_t>(k)] +
             alpha_ * topic_prior_[static_cast<std::size_t>(k)]);
  }
}

double TopicModel::sweep() {
  if (tokens_.size() != doc_ids_.size())
    throw DataError("model has no bound corpus; call init before sweeping");
  std::vector<double> weights(static_cast<std::size_t>(K_));
  for (std::size_t d = 0; d < tokens_.size(); ++d) {
    for (std::size_t t = 0; t < tokens_[d].size(); ++t) {
      const int w = tokens_[d][t];
      const int j = pred_node_[d][t];
      remove_token(static_cast<int>(d), j, w, z_[d][t]);
      topic_weights(static_cast<int>(d), j, w, weights);
      const int k = rng_.categorical(weights);
      add_token(static_cast<int>(d), j, w, k);
      z_[d][t] = k;
    }
  }
  return joint_log_prob();
}

std::vector<double> TopicModel::train(int sweeps) {
  if (sweeps < 0) throw UsageError("sweeps must be >= 0");
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(sweeps));
  for (int i = 0; i < sweeps; ++i) trace.push_back(sweep());
  return trace;
}

std::vector<double> TopicModel::gibbs_conditional(int d, std::size_t t) {
  const int w = tokens_[static_cast<std::size_t>(d)][t];
  const int j = pred_node_[static_cast<std::size_t>(d)][t];
  const int k_old = z_[static_cast<std::size_t>(d)][t];
  remove_token(d, j, w, k_old);
  std::vector<double> weights(static_cast<std::size_t>(K_));
  topic_weights(d, j, w, weights);
  add_token(d, j, w, k_old);
  double sum = 0.0;
  for (double v : weights) sum += v;
  for (double& v : weights) v /= sum;
  return weights;
}

double TopicModel::joint_log_prob() const {
  double total = 0.0;
  const std::size_t C = static_cast<std::size_t>(tree_.size());
  const std::size_t W = static_cast<std::size_t>(W_);
  // Word factor.  Each token enters exactly one node's factor, its
  // prediction node; the stored tables are ancestor-propagated, so a node's
  // own-factor counts are its table minus its children's tables.  Measures
  // keep seeing the propagated counts.  Children have larger ids than
  // parents, so a single id-ordered pass can carry each node's measure
  // computed from its parent's counts and measure.
  std::vector<std::vector<double>> measure(C);
  std::vector<double> own(W);
  for (int k = 0; k < K_; ++k) {
    for (std::size_t j = 0; j < C; ++j) {
      const auto& node = tree_.node(static_cast<int>(j));
      if (node.parent < 0) {
        measure[j] = root_measure_;
      } else {
        const std::size_t p = static_cast<std::size_t>(node.parent);
        const double denom = node_topic_total(node.parent, k) + beta_;
        measure[j].resize(W);
        for (std::size_t i = 0; i < W; ++i)
          measure[j][i] =
              (word_count(node.parent, k, static_cast<int>(i)) + beta_ * measure[p][i]) / denom;
      }
      for (std::size_t i = 0; i < W; ++i)
        own[i] = word_count(static_cast<int>(j), k, static_cast<int>(i));
      for (const auto& [sym, child] : node.children)
        for (std::size_t i = 0; i < W; ++i) own[i] -= word_count(child, k, static_cast<int>(i));
      double own_total = 0.0;
      for (std::size_t i = 0; i < W; ++i) own_total += own[i];
      double node_term = log_gamma(beta_) - log_gamma(own_total + beta_);
      for (std::size_t i = 0; i < W; ++i) {
        const double prior = beta_ * measure[j][i];
        node_term += log_gamma(own[i] + prior) - log_gamma(prior);
      }
      total += node_term;
    }
  }
  // Document factor.
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    double doc_term = log_gamma(alpha_);
    for (int k = 0; k < K_; ++k) {
      const double prior = alpha_ * topic_prior_[static_cast<std::size_t>(k)];
      doc_term -= log_gamma(prior);
      doc_term += log_gamma(doc_topic(static_cast<int>(d), k) + prior);
    }
    doc_term -= log_gamma(doc_totals_[d] + alpha_);
    total += doc_term;
  }
  return total;
}

bool TopicModel::counts_consistent() const {
  if (tokens_.size() != doc_ids_.size()) return false;
  std::vector<double> wc(word_counts_.size(), 0.0);
  std::vector<double> ntt(node_topic_totals_.size(), 0.0);
  std::vector<double> dt(doc_topic_.size(), 0.0);
  std::vector<double> dtot(doc_totals_.size(), 0.0);
  for (std::size_t d = 0; d < tokens_.size(); ++d) {
    for (std::size_t t = 0; t < tokens_[d].size(); ++t) {
      const int w = tokens_[d][t];
      const int k = z_[d][t];
      for (int n : tree_.path_to_root(pred_node_[d][t])) {
        wc[word_index(n, k, w)] += 1.0;
        ntt[static_cast<std::size_t>(n) * static_cast<std::size_t>(K_) +
            static_cast<std::size_t>(k)] += 1.0;
      }
      dt[d * static_cast<std::size_t>(K_) + static_cast<std::size_t>(k)] += 1.0;
      dtot[d] += 1.0;
    }
  }
  return wc == word_counts_ && ntt == node_topic_totals_ && dt == doc_topic_ &&
         dtot == doc_totals_;
}

std::vector<double> TopicModel::theta_hat(int d) const {
  std::vector<double> theta(static_cast<std::size_t>(K_));
  const double denom = doc_totals_[static_cast<std::size_t>(d)] + alpha_;
  for (int k = 0; k < K_; ++k)
    theta[static_cast<std::size_t>(k)] =
        (doc_topic(d, k) + alpha_ * topic_prior_[static_cast<std::size_t>(k)]) / denom;
  return theta;
}

std::vector<double> TopicModel::topic_measure(int node, int k) const {
  const int parent = tree_.node(node).parent;
  if (parent < 0) return root_measure_;
  return phi_hat(parent, k);
}

double TopicModel::topic_measure_component(int node, int k, int w) const {
  const int parent = tree_.node(node).parent;
  if (parent < 0) return root_measure_[static_cast<std::size_t>(w)];
  return phi_hat_component(parent, k, w);
}

std::vector<double> TopicModel::phi_hat(int node, int k) const {
  std::vector<double> p = root_measure_;
  const auto& path = tree_.path_to_root(node);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const double denom = node_topic_total(*it, k) + beta_;
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = (word_count(*it, k, static_cast<int>(i)) + beta_ * p[i]) / denom;
  }
  return p;
}

double TopicModel::phi_hat_component(int node, int k, int w) const {
  double p = root_measure_[static_cast<std::size_t>(w)];
  const auto& path = tree_.path_to_root(node);
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    p = (word_count(*it, k, w) + beta_ * p) / (node_topic_total(*it, k) + beta_);
  return p;
}

std::vector<double> TopicModel::predict_s1(const Document& doc, int s, std::uint64_t seed) const {
  if (s < 1) throw UsageError("topic sample count s must be >= 1");
  Rng rng(seed);
  std::vector<double> steps;
  steps.reserve(doc.tokens.size());
  std::vector<double> theta = topic_prior_;
  std::vector<double> pseudo(static_cast<std::size_t>(K_), 0.0);
  double pseudo_total = 0.0;
  std::vector<int> freq(static_cast<std::size_t>(K_));
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const int w = doc.tokens[t];
    const int j = tree_.lookup(doc.tokens, t);
    std::fill(freq.begin(), freq.end(), 0);
    for (int u = 0; u < s; ++u) ++freq[static_cast<std::size_t>(rng.categorical(theta))];
    double lik = 0.0;
    for (int k = 0; k < K_; ++k) {
      if (freq[static_cast<std::size_t>(k)] == 0) continue;
      lik += freq[static_cast<std::size_t>(k)] * phi_hat_component(j, k, w);
    }
    lik /= static_cast<double>(s);
    steps.push_back(std::log(lik));
    for (int k = 0; k < K_; ++k)
      pseudo[static_cast<std::size_t>(k)] +=
          static_cast<double>(freq[static_cast<std::size_t>(k)]) / static_cast<double>(s);
    pseudo_total += 1.0;
    for (int k = 0; k < K_; ++k)
      theta[static_cast<std::size_t>(k)] =
          (pseudo[static_cast<std::size_t>(k)] + alpha_ * topic_prior_[static_cast<std::size_t>(k)]) /
          (pseudo_total + alpha_);
  }
  return steps;
}

std::vector<double> TopicModel::predict_s2(const Document& doc, int s, std::uint64_t seed) const {
  if (s < 1) throw UsageError("topic sample count s must be >= 1");
  Rng rng(seed);
  std::vector<double> wc = word_counts_;
  std::vector<double> ntt = node_topic_totals_;
  const auto phi_local = [&](int node, int k, int w) {
    double p = root_measure_[static_cast<std::size_t>(w)];
    const auto& path = tree_.path_to_root(node);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const std::size_t nk = static_cast<std::size_t>(*it) * static_cast<std::size_t>(K_) +
                             static_cast<std::size_t>(k);
      p = (wc[nk * static_cast<std::size_t>(W_) + static_cast<std::size_t>(w)] + beta_ * p) /
          (ntt[nk] + beta_);
    }
    return p;
  };

  std::vector<double> steps;
  steps.reserve(doc.tokens.size());
  std::vector<double> theta = topic_prior_;
  std::vector<double> pseudo(static_cast<std::size_t>(K_), 0.0);
  double pseudo_total = 0.0;
  std::vector<int> freq(static_cast<std::size_t>(K_));
  std::vector<double> r(static_cast<std::size_t>(K_));
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const int w = doc.tokens[t];
    const int j = tree_.lookup(doc.tokens, t);
    std::fill(freq.begin(), freq.end(), 0);
    for (int u = 0; u < s; ++u) ++freq[static_cast<std::size_t>(rng.categorical(theta))];
    double lik = 0.0;
    for (int k = 0; k < K_; ++k) {
      if (freq[static_cast<std::size_t>(k)] == 0) continue;
      lik += freq[static_cast<std::size_t>(k)] * phi_local(j, k, w);
    }
    lik /= static_cast<double>(s);
    steps.push_back(std::log(lik));

    // Feed the observed token back as fractional counts, split across
    // topics by the posterior of z for this token under the running theta.
    double r_sum = 0.0;
    for (int k = 0; k < K_; ++k) {
      r[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)] * phi_local(j, k, w);
      r_sum += r[static_cast<std::size_t>(k)];
    }
    if (!(r_sum > 0.0)) throw NumericError("zero posterior mass in fractional update");
    for (double& v : r) v /= r_sum;
    for (int n : tree_.path_to_root(j)) {
      for (int k = 0; k < K_; ++k) {
        const std::size_t nk = static_cast<std::size_t>(n) * static_cast<std::size_t>(K_) +
                               static_cast<std::size_t>(k);
        wc[nk * static_cast<std::size_t>(W_) + static_cast<std::size_t>(w)] +=
            r[static_cast<std::size_t>(k)];
        ntt[nk] += r[static_cast<std::size_t>(k)];
      }
    }

    for (int k = 0; k < K_; ++k)
      pseudo[static_cast<std::size_t>(k)] +=
          static_cast<double>(freq[static_cast<std::size_t>(k)]) / static_cast<double>(s);
    pseudo_total += 1.0;
    for (int k = 0; k < K_; ++k)
      theta[static_cast<std::size_t>(k)] =
          (pseudo[static_cast<std::size_t>(k)] + alpha_ * topic_prior_[static_cast<std::size_t>(k)]) /
          (pseudo_total + alpha_);
  }
  return steps;
}

Document TopicModel::generate_prior(int length, std::uint64_t seed, std::string id) const {
  if (length < 0) throw UsageError("generation length must be >= 0");
  Rng rng(seed);
  std::vector<double> urn(static_cast<std::size_t>(K_));
  for (int k = 0; k < K_; ++k)
    urn[static_cast<std::size_t>(k)] = alpha_ * topic_prior_[static_cast<std::size_t>(k)];
  Document doc;
  doc.id = std::move(id);
  doc.tokens.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    const int z = rng.categorical(urn);
    urn[static_cast<std::size_t>(z)] += 1.0;
    const int j = tree_.lookup(doc.tokens, static_cast<std::size_t>(t));
    doc.tokens.push_back(rng.categorical(phi_hat(j, z)));
  }
  return doc;
}

Document TopicModel::generate_given_z(std::span<const int> z_alloc, std::uint64_t seed,
                                      std::string id) const {
  for (int z : z_alloc)
    if (z < 0 || z >= K_) throw DataError("topic allocation out of range");
  Rng rng(seed);
  Document doc;
  doc.id = std::move(id);
  doc.tokens.reserve(z_alloc.size());
  for (std::size_t t = 0; t < z_alloc.size(); ++t) {
    const int j = tree_.lookup(doc.tokens, t);
    doc.tokens.push_back(rng.categorical(phi_hat(j, z_alloc[t])));
  }
  return doc;
}

std::vector<int> TopicModel::fold_in(const Document& doc, int sweeps, std::uint64_t seed) const {
  if (sweeps < 0) throw UsageError("sweeps must be >= 0");
  Rng rng(seed);
  std::vector<double> wc = word_counts_;
  std::vector<double> ntt = node_topic_totals_;
  std::vector<double> dt(static_cast<std::size_t>(K_), 0.0);
  const auto phi_local = [&](int node, int k, int w) {
    double p = root_measure_[static_cast<std::size_t>(w)];
    const auto& path = tree_.path_to_root(node);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const std::size_t nk = static_cast<std::size_t>(*it) * static_cast<std::size_t>(K_) +
                             static_cast<std::size_t>(k);
      p = (wc[nk * static_cast<std::size_t>(W_) + static_cast<std::size_t>(w)] + beta_ * p) /
          (ntt[nk] + beta_);
    }
    return p;
  };
  const auto adjust = [&](int node, int w, int k, double amount) {
    for (int n : tree_.path_to_root(node)) {
      const std::size_t nk = static_cast<std::size_t>(n) * static_cast<std::size_t>(K_) +
                             static_cast<std::size_t>(k);
      wc[nk * static_cast<std::size_t>(W_) + static_cast<std::size_t>(w)] += amount;
      ntt[nk] += amount;
    }
    dt[static_cast<std::size_t>(k)] += amount;
  };

  std::vector<int> pred(doc.tokens.size());
  std::vector<int> z(doc.tokens.size());
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    pred[t] = tree_.lookup(doc.tokens, t);
    z[t] = rng.uniform_int(K_);
    adjust(pred[t], doc.tokens[t], z[t], 1.0);
  }
  std::vector<double> weights(static_cast<std::size_t>(K_));
  for (int pass = 0; pass < sweeps; ++pass) {
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      const int w = doc.tokens[t];
      adjust(pred[t], w, z[t], -1.0);
      for (int k = 0; k < K_; ++k)
        weights[static_cast<std::size_t>(k)] =
            phi_local(pred[t], k, w) *
            (dt[static_cast<std::size_t>(k)] + alpha_ * topic_prior_[static_cast<std::size_t>(k)]);
      z[t] = rng.categorical(weights);
      adjust(pred[t], w, z[t], 1.0);
    }
  }
  return z;
}

void TopicModel::restore(std::vector<std::string> doc_ids, std::vector<std::vector<int>> z,
                         std::vector<double> word_counts, std::vector<double> node_topic_totals,
                         std::vector<double> doc_topic, std::vector<double> doc_totals) {
  if (word_counts.size() != word_counts_.size() ||
      node_topic_totals.size() != node_topic_totals_.size())
    throw DataError("restored count tables do not match the tree shape");
  if (z.size() != doc_ids.size() ||
      doc_topic.size() != doc_ids.size() * static_cast<std::size_t>(K_) ||
      doc_totals.size() != doc_ids.size())
    throw DataError("restored document tables have inconsistent sizes");
  doc_ids_ = std::move(doc_ids);
  z_ = std::move(z);
  tokens_.clear();
  pred_node_.clear();
  word_counts_ = std::move(word_counts);
  node_topic_totals_ = std::move(node_topic_totals);
  doc_topic_ = std::move(doc_topic);
  doc_totals_ = std::move(doc_totals);
}

}  // namespace vargram
