#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vargram/corpus.hpp"
#include "vargram/dvmm.hpp"
#include "vargram/kernel_mmd.hpp"
#include "vargram/topic_model.hpp"

namespace vargram {

// Model family; the last three are topic mixtures, the first three plain
// Dirichlet-smoothed context models.
enum class Family { EmpMarg, DirBigram, DirVmm, Lda, TopicBigram, VarGram };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);
bool family_has_topics(Family family);

enum class Scheme { Exact, S1, S2 };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct ModelConfig {
  Family family = Family::VarGram;
  int depth = 5;
  double threshold = 1e-3;
  int topics = 10;
  double alpha = 1.0;
  double beta = 1.0;
  int s = 10;          // topic samples per prediction step
  int sweeps = 2000;
  int burn_in = 1000;
  std::uint64_t seed = 0;

  // Applies the family constraints: EmpMarg pins depth 0 and a vanishing
  // beta; the bigram families pin depth 1 (with a complete depth-1 tree);
  // LDA pins depth 0; non-topic families pin topics=1.
  ModelConfig resolved() const;
};

struct TrainedModel {
  ModelConfig config;  // resolved form
  Alphabet alphabet;
  std::variant<DvmmModel, TopicModel> model;
  std::vector<double> trace;  // per-sweep joint log-prob (topic families)

  bool is_topic() const { return std::holds_alternative<TopicModel>(model); }
  const DvmmModel& dvmm() const { return std::get<DvmmModel>(model); }
  const TopicModel& topic() const { return std::get<TopicModel>(model); }
  const ContextTree& tree() const;
};

// Builds the tree per config (complete depth-1 tree for the bigram
// families) and fits/trains the family's model.
TrainedModel train_model(const Corpus& train, const ModelConfig& config);

// Per-position ln p(token | prefix) for one held-out document.  Randomized
// schemes draw their seed from (config seed, document id), so scores do not
// depend on evaluation order.
std::vector<double> score_doc(const TrainedModel& model, const Document& doc, Scheme scheme);

struct EvalResult {
  // Mean over documents of the per-document mean step score.
  double average = 0.0;
  std::vector<std::pair<std::string, double>> per_doc;  // id, per-step mean
  int scored_docs = 0;
  int skipped_empty = 0;
};

// Next-step evaluation of a trained model on a test corpus.  Exact scoring
// is only valid for non-topic families, S1/S2 only for topic families.
EvalResult eval_nextstep(const TrainedModel& model, const Corpus& test, Scheme scheme,
                         bool truncate, int jobs = 1);

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  double score = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // lexicographic (alpha, beta) order
  double best_alpha = 0.0;
  double best_beta = 0.0;
};

inline constexpr double kGridValues[] = {0.01, 1.0, 5.0, 10.0, 50.0, 100.0};

// K-fold cross-validated grid search over (alpha, beta).  Folds are taken
// by document index modulo `folds`; ties break toward the earlier cell in
// lexicographic (alpha, beta) order.
GridResult grid_search_cv(const Corpus& corpus, const ModelConfig& tmpl, int folds, Scheme scheme,
                          int jobs = 1);

enum class MmdMode { Prior, GivenZ, TrainVsTest };

std::string_view mmd_mode_name(MmdMode mode);
MmdMode parse_mmd_mode(std::string_view name);

struct MmdOptions {
  int window = 4;        // kernel k
  int max_mismatch = 1;  // kernel m
  int repeats = 20;
  MmdMode mode = MmdMode::Prior;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct MmdExperiment {
  MmdResult result;
  std::vector<GramMatrix> grams;  // one per repeat
  std::vector<std::string> warnings;
};

// Per repeat: one model sample per test document with matched length
// (prior mode), or with topic allocations folded in from the test document
// (given_z), or a draw of training documents (train_vs_test, needs
// `train`); then normalized Gram and unbiased MMD^2 against the test set.
// Melodic corpora are remapped to the 25-symbol alphabet before kernels.
MmdExperiment mmd_experiment(const TrainedModel& model, const Corpus& test, const Corpus* train,
                             const MmdOptions& opts);

struct InspectReport {
  std::vector<std::string> groups;           // tag values, sorted
  std::vector<std::vector<double>> counts;   // [topic][group] allocation mass
  double pearson = 0.0;                      // across the first two groups
  std::string scatter_csv() const;
};

// Per-topic allocation counts split by the value of `tag_key` on each
// trained document, plus the correlation between the first two groups.
InspectReport inspect_allocations(const TopicModel& model, const Corpus& corpus,
                                  const std::string& tag_key);

}  // namespace vargram
