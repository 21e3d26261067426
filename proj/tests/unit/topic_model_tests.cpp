#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vargram/alphabet.hpp>
#include <vargram/context_tree.hpp>
#include <vargram/corpus.hpp>
#include <vargram/dvmm.hpp>
#include <vargram/errors.hpp>
#include <vargram/topic_model.hpp>

#include <cmath>
#include <vector>

#include "testutil/oracles.hpp"

using namespace vargram;
using testoracle::make_corpus;

namespace {

// 2 docs x 6 tokens, W=3, depth-1 tree: the instance small enough for
// exhaustive checks.
struct TinyInstance {
  Alphabet alphabet{std::vector<std::string>{"a", "b", "c"}};
  Corpus corpus;
  ContextTree tree;

  TinyInstance()
      : corpus(make_corpus(alphabet, {{"d1", "a a b a c a"}, {"d2", "c c b c a b"}})),
        tree(ContextTree::build(corpus, 1, 0.0)) {}
};

std::vector<std::vector<int>> doc_tokens(const Corpus& corpus) {
  std::vector<std::vector<int>> out;
  for (const auto& doc : corpus.documents()) out.push_back(doc.tokens);
  return out;
}

std::vector<double> uniform(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

}  // namespace

TEST_CASE("init assigns every token and rebuilds counts consistently") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 3;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 42);
  CHECK(model.counts_consistent());
  CHECK(model.doc_total(0) == 6.0);
  CHECK(model.doc_total(1) == 6.0);
  double root_total = 0.0;
  for (int k = 0; k < 3; ++k) root_total += model.node_topic_total(0, k);
  CHECK(root_total == doctest::Approx(12.0).epsilon(1e-12));

  TopicModel again(tiny.tree, hp);
  again.init(tiny.corpus, 42);
  CHECK(again.assignments() == model.assignments());
  TopicModel other(tiny.tree, hp);
  other.init(tiny.corpus, 43);
  CHECK(other.assignments() != model.assignments());
}

TEST_CASE("K=1 pins every assignment to topic zero") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 1;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 7);
  for (const auto& row : model.assignments())
    for (int z : row) CHECK(z == 0);
  CHECK(model.doc_topic(0, 0) == 6.0);
  std::vector<double> cond = model.gibbs_conditional(0, 2);
  REQUIRE(cond.size() == 1);
  CHECK(cond[0] == 1.0);
  auto before = model.assignments();
  model.sweep();
  CHECK(model.assignments() == before);
  std::vector<double> trace = model.train(5);
  REQUIRE(trace.size() == 5);
  for (double v : trace) CHECK(v == doctest::Approx(trace[0]).epsilon(1e-12));
}

TEST_CASE("topic measure recursion values") {
  Alphabet a({"a", "b"});
  Corpus c = make_corpus(a, {{"d", "a a"}});
  // Tree: root plus child <a>; token 2 gives parent counts a:1 at the root
  // under topic 0 after forcing z (K=1 makes z deterministic).
  ContextTree tree = ContextTree::build(c, 1, 0.0);
  Hyperparams hp;
  hp.topics = 1;
  hp.beta = 2.0;
  TopicModel model(tree, hp);
  model.init(c, 0);
  // Root counts under propagation: a:2. Child measure = (2 + 2*0.5)/(2+2).
  int child = tree.child_of(0, 0);
  REQUIRE(child > 0);
  CHECK(model.topic_measure(0, 0) == uniform(2));
  std::vector<double> m = model.topic_measure(child, 0);
  CHECK(m[0] == doctest::Approx(0.75).epsilon(1e-12));

  // The spec's one-step case: parent counts a:1, beta=2 -> m(a) = 2/3.
  Corpus c1 = make_corpus(a, {{"d", "b a"}});
  ContextTree tree1 = ContextTree::build(c1, 1, 0.0);
  TopicModel model1(tree1, hp);
  model1.init(c1, 0);
  int child_b = tree1.child_of(0, 1);
  REQUIRE(child_b > 0);
  // Root propagated counts: b:1, a:1 -> measure at any child uses both.
  std::vector<double> m1 = model1.topic_measure(child_b, 0);
  CHECK(m1[0] == doctest::Approx((1.0 + 2.0 * 0.5) / (2.0 + 2.0)).epsilon(1e-12));

  // Direct one-step value on a planted single-count parent.
  Hyperparams hp2;
  hp2.topics = 1;
  hp2.beta = 2.0;
  ContextTree planted(2);
  int pc = planted.add_child(0, 0);
  planted.finalize();
  TopicModel planted_model(planted, hp2);
  planted_model.restore({}, {}, {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, {}, {});
  std::vector<double> mp = planted_model.topic_measure(pc, 0);
  CHECK(mp[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(mp[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("huge beta pins measures to the root measure") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  hp.beta = 1e9;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 3);
  for (const auto& node : tiny.tree.nodes())
    for (int k = 0; k < 2; ++k) {
      std::vector<double> m = model.topic_measure(node.id, k);
      for (double v : m) CHECK(std::abs(v - 1.0 / 3.0) < 1e-6);
    }
}

TEST_CASE("gibbs conditional equals the from-scratch oracle") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  hp.alpha = 0.8;
  hp.beta = 1.3;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 12345);
  auto docs = doc_tokens(tiny.corpus);
  for (int pass = 0; pass < 3; ++pass) {
    auto z = model.assignments();
    for (int d = 0; d < 2; ++d) {
      for (std::size_t t = 0; t < 6; ++t) {
        std::vector<double> got = model.gibbs_conditional(d, t);
        std::vector<double> expected = testoracle::oracle_gibbs_conditional(
            tiny.tree, docs, z, 2, hp.alpha, uniform(2), hp.beta, uniform(3), d, t);
        REQUIRE(got.size() == expected.size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expected[k]) < 1e-12);
      }
    }
    CHECK(model.assignments() == z);
    CHECK(model.counts_consistent());
    model.sweep();
  }
}

TEST_CASE("gibbs conditional with asymmetric priors matches the oracle") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 3;
  hp.alpha = 2.5;
  hp.beta = 0.4;
  hp.topic_prior = {0.5, 0.3, 0.2};
  hp.root_measure = {0.6, 0.3, 0.1};
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 77);
  model.train(2);
  auto docs = doc_tokens(tiny.corpus);
  auto z = model.assignments();
  for (int d = 0; d < 2; ++d)
    for (std::size_t t = 0; t < 6; ++t) {
      std::vector<double> got = model.gibbs_conditional(d, t);
      std::vector<double> expected = testoracle::oracle_gibbs_conditional(
          tiny.tree, docs, z, 3, hp.alpha, hp.topic_prior, hp.beta, hp.root_measure, d, t);
      for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expected[k]) < 1e-12);
    }
}

TEST_CASE("single token instance gives a uniform conditional") {
  Alphabet a({"a", "b"});
  Corpus c = make_corpus(a, {{"d", "a"}});
  ContextTree tree(2);
  Hyperparams hp;
  hp.topics = 4;
  TopicModel model(tree, hp);
  model.init(c, 5);
  std::vector<double> cond = model.gibbs_conditional(0, 0);
  for (double v : cond) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("joint log-prob equals the oracle") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  hp.alpha = 1.0;
  hp.beta = 1.0;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 99);
  auto docs = doc_tokens(tiny.corpus);
  for (int pass = 0; pass < 4; ++pass) {
    double got = model.joint_log_prob();
    double expected = testoracle::oracle_joint_log_prob(tiny.tree, docs, model.assignments(), 2,
                                                        hp.alpha, uniform(2), hp.beta, uniform(3));
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    model.sweep();
  }
}

TEST_CASE("joint log-prob of one uniform binary token is ln(1/2)") {
  Alphabet a({"a", "b"});
  Corpus c = make_corpus(a, {{"d", "a"}});
  ContextTree tree(2);
  for (double alpha : {0.3, 1.0, 7.0}) {
    for (double beta : {0.5, 1.0, 20.0}) {
      Hyperparams hp;
      hp.topics = 1;
      hp.alpha = alpha;
      hp.beta = beta;
      TopicModel model(tree, hp);
      model.init(c, 1);
      CHECK(model.joint_log_prob() == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint log-prob of an empty corpus is zero") {
  Alphabet a({"a", "b"});
  Corpus c(a, {});
  ContextTree tree(2);
  Hyperparams hp;
  hp.topics = 3;
  TopicModel model(tree, hp);
  model.init(c, 1);
  CHECK(model.joint_log_prob() == 0.0);
}

TEST_CASE("joint log-prob is invariant to permuting topic labels") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 3;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 31);
  model.train(3);
  const double base = model.joint_log_prob();

  // Swap topics 0 and 2 everywhere and restore into a fresh model.
  auto swap_k = [](int k) { return k == 0 ? 2 : (k == 2 ? 0 : k); };
  auto z = model.assignments();
  for (auto& row : z)
    for (int& v : row) v = swap_k(v);
  const int nodes = tiny.tree.size();
  std::vector<double> wc(static_cast<std::size_t>(nodes) * 3 * 3);
  std::vector<double> ntt(static_cast<std::size_t>(nodes) * 3);
  std::vector<double> dt(2 * 3);
  std::vector<double> dtot = {model.doc_total(0), model.doc_total(1)};
  for (int j = 0; j < nodes; ++j)
    for (int k = 0; k < 3; ++k) {
      ntt[static_cast<std::size_t>(j * 3 + swap_k(k))] = model.node_topic_total(j, k);
      for (int w = 0; w < 3; ++w)
        wc[static_cast<std::size_t>((j * 3 + swap_k(k)) * 3 + w)] = model.word_count(j, k, w);
    }
  for (int d = 0; d < 2; ++d)
    for (int k = 0; k < 3; ++k)
      dt[static_cast<std::size_t>(d * 3 + swap_k(k))] = model.doc_topic(d, k);

  TopicModel permuted(tiny.tree, hp);
  permuted.restore(model.doc_ids(), z, wc, ntt, dt, dtot);
  CHECK(permuted.joint_log_prob() == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("theta and phi are posterior means of the counts") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  hp.alpha = 0.9;
  hp.beta = 1.7;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 8);
  model.train(3);
  auto docs = doc_tokens(tiny.corpus);
  auto counts = testoracle::scan_topic_counts(tiny.tree, docs, model.assignments(), 2);
  for (const auto& node : tiny.tree.nodes())
    for (int k = 0; k < 2; ++k) {
      std::vector<double> got = model.phi_hat(node.id, k);
      std::vector<double> expected =
          testoracle::oracle_phi_hat(tiny.tree, counts, node.id, k, hp.beta, uniform(3));
      double sum = 0.0;
      for (std::size_t w = 0; w < 3; ++w) {
        CHECK(std::abs(got[w] - expected[w]) < 1e-12);
        CHECK(got[w] == doctest::Approx(model.phi_hat_component(node.id, k, static_cast<int>(w)))
                            .epsilon(1e-12));
        sum += got[w];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  for (int d = 0; d < 2; ++d) {
    std::vector<double> theta = model.theta_hat(d);
    double sum = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double expected = (model.doc_topic(d, k) + hp.alpha * 0.5) / (6.0 + hp.alpha);
      CHECK(theta[static_cast<std::size_t>(k)] == doctest::Approx(expected).epsilon(1e-12));
      sum += theta[static_cast<std::size_t>(k)];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zero-count model predicts from the root measure") {
  ContextTree tree(4);
  int child = tree.add_child(0, 1);
  tree.finalize();
  Hyperparams hp;
  hp.topics = 2;
  hp.root_measure = {0.4, 0.3, 0.2, 0.1};
  TopicModel model(tree, hp);
  for (int k = 0; k < 2; ++k) {
    std::vector<double> phi = model.phi_hat(child, k);
    for (std::size_t w = 0; w < 4; ++w)
      CHECK(phi[w] == doctest::Approx(hp.root_measure[w]).epsilon(1e-12));
  }
}

TEST_CASE("predict_s1 with one topic reduces to the smoothed context model") {
  Alphabet a({"a", "b", "c"});
  Corpus train = make_corpus(a, {{"d1", "a a b a c a b"}, {"d2", "c b a c a"}});
  Corpus test = make_corpus(a, {{"t", "a b c a a b"}});
  ContextTree tree = ContextTree::build(train, 2, 0.0);
  Hyperparams hp;
  hp.topics = 1;
  hp.beta = 1.4;
  TopicModel model(tree, hp);
  model.init(train, 2);
  DvmmModel ref = DvmmModel::fit(tree, train, 1.4);
  std::vector<double> got = model.predict_s1(test.doc(0), 10, 5);
  std::vector<double> expected = ref.step_log_likelihoods(test.doc(0));
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-12);
}

TEST_CASE("predict_s2 with one topic is a sequentially updated context model") {
  Alphabet a({"a", "b"});
  Corpus train = make_corpus(a, {{"d", "a a b a"}});
  Corpus test = make_corpus(a, {{"t", "b b a b a a"}});
  ContextTree tree = ContextTree::build(train, 1, 0.0);
  Hyperparams hp;
  hp.topics = 1;
  hp.beta = 2.0;
  TopicModel model(tree, hp);
  model.init(train, 2);
  std::vector<double> got = model.predict_s2(test.doc(0), 4, 5);

  DvmmModel ref = DvmmModel::fit(tree, train, 2.0);
  const auto& tokens = test.doc(0).tokens;
  std::vector<double> expected;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    int node = tree.lookup(tokens, t);
    expected.push_back(std::log(ref.predictive_component(node, tokens[t])));
    ref.observe(node, tokens[t], 1.0);
  }
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-12);
  // The model itself is untouched by prediction.
  CHECK(model.counts_consistent());
  CHECK(model.node_topic_total(0, 0) == 4.0);
}

TEST_CASE("predict_s1 step likelihood converges to the prior mixture") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 21);
  model.train(5);
  Alphabet a = tiny.alphabet;
  Corpus one = make_corpus(a, {{"t", "b"}});
  const int s = 250000;
  std::vector<double> steps = model.predict_s1(one.doc(0), s, 9);
  REQUIRE(steps.size() == 1);
  double target = 0.0;
  for (int k = 0; k < 2; ++k) target += 0.5 * model.phi_hat_component(0, k, 1);
  CHECK(std::abs(std::exp(steps[0]) - target) <= 3.0 / std::sqrt(static_cast<double>(s)));
}

TEST_CASE("motif repetition rewards the count-feedback scheme") {
  Alphabet a({"a", "b", "c", "d"});
  Corpus train = make_corpus(a, {{"d1", "a a a a b a a a a b"}, {"d2", "b a a b a a a a a a"}});
  // The test document repeats a motif never seen in training.
  Corpus test = make_corpus(a, {{"t", "c d c d c d c d c d c d c d c d"}});
  ContextTree tree = ContextTree::build(train, 2, 0.0);
  Hyperparams hp;
  hp.topics = 2;
  TopicModel model(tree, hp);
  model.init(train, 4);
  model.train(20);
  double s1 = 0.0, s2 = 0.0;
  for (double v : model.predict_s1(test.doc(0), 10, 6)) s1 += v;
  for (double v : model.predict_s2(test.doc(0), 10, 6)) s2 += v;
  CHECK(s2 >= s1);
}

TEST_CASE("prediction validates its arguments") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 1);
  Document doc;
  doc.id = "t";
  doc.tokens = {0, 1};
  CHECK_THROWS_AS(model.predict_s1(doc, 0, 1), UsageError);
  CHECK_THROWS_AS(model.predict_s2(doc, -1, 1), UsageError);
  Document empty;
  CHECK(model.predict_s1(empty, 5, 1).empty());
  CHECK(model.predict_s2(empty, 5, 1).empty());
}

TEST_CASE("generation modes are deterministic and length-correct") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 2);
  model.train(10);
  Document g1 = model.generate_prior(40, 17, "g");
  Document g2 = model.generate_prior(40, 17, "g");
  CHECK(g1.tokens == g2.tokens);
  CHECK(g1.tokens.size() == 40);
  CHECK(model.generate_prior(0, 1, "g").tokens.empty());

  std::vector<int> alloc = {0, 1, 0, 1, 1};
  Document z1 = model.generate_given_z(alloc, 3, "z");
  Document z2 = model.generate_given_z(alloc, 3, "z");
  CHECK(z1.tokens == z2.tokens);
  CHECK(z1.tokens.size() == 5);
  CHECK(model.generate_given_z(std::vector<int>{}, 3, "z").tokens.empty());
  std::vector<int> bad = {0, 2};
  CHECK_THROWS_AS(model.generate_given_z(bad, 3, "z"), DataError);
}

TEST_CASE("huge alpha makes prior generation follow the topic prior") {
  // Planted counts: topic k emits symbol k almost surely, so the sampled
  // word identifies the sampled topic.
  ContextTree tree(3);
  Hyperparams hp;
  hp.topics = 3;
  hp.alpha = 1e6;
  TopicModel model(tree, hp);
  std::vector<double> wc(9, 0.0);
  std::vector<double> ntt(3, 0.0);
  for (int k = 0; k < 3; ++k) {
    wc[static_cast<std::size_t>(k * 3 + k)] = 1e9;
    ntt[static_cast<std::size_t>(k)] = 1e9;
  }
  model.restore({}, {}, wc, ntt, {}, {});
  std::vector<int> freq(3, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    Document doc = model.generate_prior(1, derive_seed(100, static_cast<std::uint64_t>(rep)), "g");
    ++freq[static_cast<std::size_t>(doc.tokens[0])];
  }
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(freq[static_cast<std::size_t>(k)] / 1000.0 - 1.0 / 3.0) < 0.05);
}

TEST_CASE("one-topic generation modes share one law") {
  Alphabet a({"a", "b"});
  Corpus train = make_corpus(a, {{"d", "a a a b"}});
  ContextTree tree(2);
  Hyperparams hp;
  hp.topics = 1;
  TopicModel model(tree, hp);
  model.init(train, 1);
  const double p_a = model.phi_hat_component(0, 0, 0);
  Document prior = model.generate_prior(20000, 5, "p");
  std::vector<int> zeros(20000, 0);
  Document given = model.generate_given_z(zeros, 6, "z");
  auto frequency = [](const Document& doc) {
    double hits = 0.0;
    for (int t : doc.tokens) hits += t == 0 ? 1.0 : 0.0;
    return hits / static_cast<double>(doc.tokens.size());
  };
  CHECK(std::abs(frequency(prior) - p_a) < 0.02);
  CHECK(std::abs(frequency(given) - p_a) < 0.02);
}

TEST_CASE("fold_in allocates test tokens without touching the model") {
  TinyInstance tiny;
  Hyperparams hp;
  hp.topics = 2;
  TopicModel model(tiny.tree, hp);
  model.init(tiny.corpus, 13);
  model.train(10);
  const double joint_before = model.joint_log_prob();
  Document doc;
  doc.id = "t";
  doc.tokens = {0, 1, 2, 0, 0};
  std::vector<int> z1 = model.fold_in(doc, 20, 7);
  std::vector<int> z2 = model.fold_in(doc, 20, 7);
  REQUIRE(z1.size() == 5);
  CHECK(z1 == z2);
  for (int z : z1) {
    CHECK(z >= 0);
    CHECK(z < 2);
  }
  CHECK(model.joint_log_prob() == joint_before);
  CHECK(model.counts_consistent());
}

TEST_CASE("training improves the joint objective on structured data") {
  // Two docs with disjoint vocabularies: topics must separate them.
  Alphabet a({"a", "b", "c", "d"});
  Corpus train = make_corpus(a, {{"d1", "a b a b a b a b a b"}, {"d2", "c d c d c d c d c d"}});
  ContextTree tree(4);
  Hyperparams hp;
  hp.topics = 2;
  hp.alpha = 0.1;
  hp.beta = 0.1;
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TopicModel model(tree, hp);
    model.init(train, seed);
    const double before = model.joint_log_prob();
    std::vector<double> trace = model.train(40);
    if (trace.back() > before) ++improved;
  }
  CHECK(improved >= 4);
}

TEST_CASE("constructor validation") {
  ContextTree tree(2);
  Hyperparams bad;
  bad.topics = 0;
  CHECK_THROWS_AS(TopicModel(tree, bad), UsageError);
  Hyperparams neg;
  neg.alpha = -1.0;
  CHECK_THROWS_AS(TopicModel(tree, neg), UsageError);
  Hyperparams badn;
  badn.topics = 2;
  badn.topic_prior = {0.5, 0.6};
  CHECK_THROWS_AS(TopicModel(tree, badn), NumericError);
}
