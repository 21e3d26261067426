#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "testutil/oracles.hpp"
#include "vargram/errors.hpp"
#include "vargram/harness.hpp"
#include "vargram/model_io.hpp"

using namespace vargram;

namespace {

ModelConfig dvmm_config() {
  ModelConfig c;
  c.family = Family::DirVmm;
  c.depth = 2;
  c.threshold = 0.0;
  c.beta = 1.7;
  c.seed = 11;
  return c;
}

ModelConfig topic_config() {
  ModelConfig c;
  c.family = Family::VarGram;
  c.depth = 2;
  c.threshold = 0.0;
  c.topics = 3;
  c.alpha = 0.9;
  c.beta = 1.3;
  c.s = 40;
  c.sweeps = 15;
  c.burn_in = 5;
  c.seed = 23;
  return c;
}

std::string save_to_string(const TrainedModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

TrainedModel load_from_string(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

}  // namespace

TEST_CASE("context model round-trips through the model file") {
  Corpus train = testoracle::random_corpus(6, 5, 12, 4, 301);
  TrainedModel model = train_model(train, dvmm_config());
  TrainedModel loaded = load_from_string(save_to_string(model));

  CHECK_FALSE(loaded.is_topic());
  CHECK(loaded.config.family == Family::DirVmm);
  CHECK(loaded.config.depth == 2);
  CHECK(loaded.config.beta == 1.7);
  CHECK(loaded.config.seed == 11);
  CHECK(loaded.alphabet.size() == 4);
  CHECK(loaded.alphabet.name(2) == train.alphabet().name(2));

  const ContextTree& tree = model.tree();
  REQUIRE(loaded.tree().size() == tree.size());
  for (int j = 0; j < tree.size(); ++j) {
    CHECK(loaded.tree().node(j).parent == tree.node(j).parent);
    CHECK(loaded.tree().node(j).symbol == tree.node(j).symbol);
    CHECK(loaded.tree().node(j).depth == tree.node(j).depth);
    CHECK(loaded.dvmm().node_total(j) == model.dvmm().node_total(j));
    for (int w = 0; w < 4; ++w) CHECK(loaded.dvmm().count(j, w) == model.dvmm().count(j, w));
    std::vector<double> p = model.dvmm().predictive(j);
    std::vector<double> q = loaded.dvmm().predictive(j);
    for (int w = 0; w < 4; ++w) CHECK(p[w] == q[w]);
  }
  CHECK(loaded.dvmm().root_measure() == model.dvmm().root_measure());

  Corpus test = testoracle::random_corpus(4, 4, 9, 4, 302);
  EvalResult a = eval_nextstep(model, test, Scheme::Exact, false);
  EvalResult b = eval_nextstep(loaded, test, Scheme::Exact, false);
  CHECK(a.average == b.average);
}

TEST_CASE("saving a loaded model reproduces the bytes") {
  Corpus train = testoracle::random_corpus(5, 4, 10, 3, 303);
  TrainedModel model = train_model(train, dvmm_config());
  std::string first = save_to_string(model);
  std::string second = save_to_string(load_from_string(first));
  CHECK(first == second);

  TrainedModel topic = train_model(train, topic_config());
  std::string tfirst = save_to_string(topic);
  std::string tsecond = save_to_string(load_from_string(tfirst));
  CHECK(tfirst == tsecond);
}

TEST_CASE("topic model round-trips counts, assignments, and trace") {
  Corpus train = testoracle::random_corpus(6, 6, 14, 4, 304);
  TrainedModel model = train_model(train, topic_config());
  TrainedModel loaded = load_from_string(save_to_string(model));

  REQUIRE(loaded.is_topic());
  const TopicModel& tm = model.topic();
  const TopicModel& lm = loaded.topic();
  CHECK(lm.topics() == tm.topics());
  CHECK(lm.alpha() == tm.alpha());
  CHECK(lm.beta() == tm.beta());
  CHECK(lm.topic_prior() == tm.topic_prior());
  CHECK(lm.root_measure() == tm.root_measure());
  CHECK(lm.doc_ids() == tm.doc_ids());
  CHECK(lm.assignments() == tm.assignments());
  CHECK(loaded.trace == model.trace);
  // No bound corpus to verify counts against after a load.
  CHECK_FALSE(lm.counts_consistent());

  for (int j = 0; j < tm.tree().size(); ++j)
    for (int k = 0; k < tm.topics(); ++k) {
      CHECK(lm.node_topic_total(j, k) == tm.node_topic_total(j, k));
      for (int w = 0; w < 4; ++w) CHECK(lm.word_count(j, k, w) == tm.word_count(j, k, w));
      std::vector<double> p = tm.phi_hat(j, k);
      std::vector<double> q = lm.phi_hat(j, k);
      for (int w = 0; w < 4; ++w) CHECK(p[w] == q[w]);
    }
  for (int d = 0; d < tm.n_docs(); ++d) {
    std::vector<double> p = tm.theta_hat(d);
    std::vector<double> q = lm.theta_hat(d);
    for (int k = 0; k < tm.topics(); ++k) CHECK(p[k] == q[k]);
  }
  CHECK(lm.joint_log_prob() == doctest::Approx(tm.joint_log_prob()).epsilon(1e-12));
}

TEST_CASE("loaded topic model predicts, generates, and folds in identically") {
  Corpus train = testoracle::random_corpus(5, 6, 12, 3, 305);
  TrainedModel model = train_model(train, topic_config());
  TrainedModel loaded = load_from_string(save_to_string(model));

  Corpus test = testoracle::random_corpus(3, 5, 9, 3, 306);
  for (Scheme scheme : {Scheme::S1, Scheme::S2}) {
    EvalResult a = eval_nextstep(model, test, scheme, false);
    EvalResult b = eval_nextstep(loaded, test, scheme, false);
    CHECK(a.average == b.average);
  }

  Document ga = model.topic().generate_prior(30, 99, "g");
  Document gb = loaded.topic().generate_prior(30, 99, "g");
  CHECK(ga.tokens == gb.tokens);

  std::vector<int> za = model.topic().fold_in(test.doc(0), 10, 5);
  std::vector<int> zb = loaded.topic().fold_in(test.doc(0), 10, 5);
  CHECK(za == zb);

  Document sa = model.topic().generate_given_z(za, 7, "s");
  Document sb = loaded.topic().generate_given_z(zb, 7, "s");
  CHECK(sa.tokens == sb.tokens);
}

TEST_CASE("a loaded topic model has no bound corpus to sweep") {
  Corpus train = testoracle::random_corpus(4, 5, 9, 3, 307);
  TrainedModel loaded = load_from_string(save_to_string(train_model(train, topic_config())));
  TopicModel& tm = std::get<TopicModel>(loaded.model);
  CHECK_THROWS_AS(tm.sweep(), DataError);
}

TEST_CASE("load rejects non-model files and unknown kinds") {
  Corpus train = testoracle::random_corpus(3, 4, 7, 3, 308);
  std::string text = save_to_string(train_model(train, dvmm_config()));
  nlohmann::json j = nlohmann::json::parse(text);

  {
    nlohmann::json bad = j;
    bad["format"] = "something-else";
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
  }
  {
    nlohmann::json bad = j;
    bad["kind"] = "mystery";
    CHECK_THROWS_WITH_AS(load_from_string(bad.dump()), doctest::Contains("mystery"), DataError);
  }
  CHECK_THROWS_AS(load_from_string("not json at all"), DataError);
  CHECK_THROWS_AS(load_from_string("{}"), DataError);
}

TEST_CASE("load reports which field is missing") {
  Corpus train = testoracle::random_corpus(3, 4, 7, 3, 309);
  std::string text = save_to_string(train_model(train, topic_config()));
  nlohmann::json j = nlohmann::json::parse(text);
  for (const char* key : {"tree", "config", "alphabet", "z", "word_counts", "doc_ids"}) {
    nlohmann::json bad = j;
    bad.erase(key);
    CHECK_THROWS_WITH_AS(load_from_string(bad.dump()), doctest::Contains(key), DataError);
  }
}

TEST_CASE("load validates the tree node table") {
  Corpus train = testoracle::random_corpus(3, 4, 7, 3, 310);
  std::string text = save_to_string(train_model(train, dvmm_config()));
  nlohmann::json j = nlohmann::json::parse(text);

  {
    nlohmann::json bad = j;
    bad["tree"] = nlohmann::json::array();
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
  }
  {
    nlohmann::json bad = j;
    bad["tree"][0]["parent"] = 3;
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
  }
  if (j["tree"].size() > 1) {
    nlohmann::json bad = j;
    bad["tree"][1]["id"] = 7;
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
    bad = j;
    bad["tree"][1]["parent"] = 5;
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
  }
  {
    nlohmann::json bad = j;
    bad["counts"] = std::vector<std::vector<double>>{{1.0, 2.0}};
    CHECK_THROWS_AS(load_from_string(bad.dump()), DataError);
  }
}
