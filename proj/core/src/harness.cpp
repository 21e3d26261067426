#include "vargram/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "vargram/errors.hpp"
#include "vargram/numerics.hpp"
#include "vargram/parallel.hpp"
#include "vargram/rng.hpp"

namespace vargram {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::EmpMarg: return "empmarg";
    case Family::DirBigram: return "dirbigram";
    case Family::DirVmm: return "dvmm";
    case Family::Lda: return "lda";
    case Family::TopicBigram: return "topicbigram";
    case Family::VarGram: return "vargram";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::EmpMarg, Family::DirBigram, Family::DirVmm, Family::Lda,
                   Family::TopicBigram, Family::VarGram})
    if (name == family_name(f)) return f;
  throw UsageError("unknown model family '" + std::string(name) + "'");
}

bool family_has_topics(Family family) {
  return family == Family::Lda || family == Family::TopicBigram || family == Family::VarGram;
}

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Exact: return "exact";
    case Scheme::S1: return "s1";
    case Scheme::S2: return "s2";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Exact, Scheme::S1, Scheme::S2})
    if (name == scheme_name(s)) return s;
  throw UsageError("unknown scheme '" + std::string(name) + "'");
}

std::string_view mmd_mode_name(MmdMode mode) {
  switch (mode) {
    case MmdMode::Prior: return "prior";
    case MmdMode::GivenZ: return "given_z";
    case MmdMode::TrainVsTest: return "train_vs_test";
  }
  return "?";
}

MmdMode parse_mmd_mode(std::string_view name) {
  for (MmdMode m : {MmdMode::Prior, MmdMode::GivenZ, MmdMode::TrainVsTest})
    if (name == mmd_mode_name(m)) return m;
  throw UsageError("unknown mmd mode '" + std::string(name) + "'");
}

ModelConfig ModelConfig::resolved() const {
  ModelConfig r = *this;
  switch (family) {
    case Family::EmpMarg:
      r.depth = 0;
      r.beta = 1e-9;
      r.topics = 1;
      break;
    case Family::DirBigram:
      r.depth = 1;
      r.topics = 1;
      break;
    case Family::DirVmm:
      r.topics = 1;
      break;
    case Family::Lda:
      r.depth = 0;
      break;
    case Family::TopicBigram:
      r.depth = 1;
      break;
    case Family::VarGram:
      break;
  }
  return r;
}

const ContextTree& TrainedModel::tree() const {
  return is_topic() ? topic().tree() : dvmm().tree();
}

namespace {

ContextTree complete_depth1_tree(int alphabet_size) {
  ContextTree tree(alphabet_size);
  for (int s = 0; s < alphabet_size; ++s) tree.add_child(0, s);
  tree.finalize();
  return tree;
}

ContextTree tree_for(const Corpus& train, const ModelConfig& config) {
  if (config.family == Family::DirBigram || config.family == Family::TopicBigram)
    return complete_depth1_tree(train.alphabet().size());
  return ContextTree::build(train, config.depth, config.threshold);
}

}  // namespace

TrainedModel train_model(const Corpus& train, const ModelConfig& raw_config) {
  const ModelConfig config = raw_config.resolved();
  if (config.depth < 0) throw UsageError("depth must be >= 0");
  if (config.sweeps < 0 || config.burn_in < 0 || config.burn_in > config.sweeps)
    throw UsageError("need sweeps >= burn_in >= 0");
  ContextTree tree = tree_for(train, config);
  if (family_has_topics(config.family)) {
    Hyperparams hyper;
    hyper.topics = config.topics;
    hyper.alpha = config.alpha;
    hyper.beta = config.beta;
    TopicModel model(std::move(tree), hyper);
    model.init(train, config.seed);
    std::vector<double> trace = model.train(config.sweeps);
    return TrainedModel{config, train.alphabet(), std::move(model), std::move(trace)};
  }
  DvmmModel model = DvmmModel::fit(tree, train, config.beta);
  return TrainedModel{config, train.alphabet(), std::move(model), {}};
}

std::vector<double> score_doc(const TrainedModel& model, const Document& doc, Scheme scheme) {
  if (scheme == Scheme::Exact) {
    if (model.is_topic())
      throw UsageError("exact scoring is only defined for non-topic families");
    return model.dvmm().step_log_likelihoods(doc);
  }
  if (!model.is_topic())
    throw UsageError("schemes s1/s2 are only defined for topic families");
  const std::uint64_t seed = derive_seed(model.config.seed, fnv1a64(doc.id));
  if (scheme == Scheme::S1) return model.topic().predict_s1(doc, model.config.s, seed);
  return model.topic().predict_s2(doc, model.config.s, seed);
}

EvalResult eval_nextstep(const TrainedModel& model, const Corpus& test, Scheme scheme,
                         bool truncate, int jobs) {
  if (test.alphabet().size() != model.alphabet.size())
    throw DataError("test corpus alphabet differs from the model's");
  const std::size_t D = test.size();
  std::vector<std::optional<double>> slots(D);
  parallel_for(jobs, D, [&](std::size_t d) {
    Document doc = test.documents()[d];
    if (truncate) doc = truncate_half(doc);
    if (doc.tokens.empty()) return;
    const std::vector<double> steps = score_doc(model, doc, scheme);
    slots[d] = mean(steps);
  });

  EvalResult result;
  std::vector<double> averages;
  for (std::size_t d = 0; d < D; ++d) {
    if (!slots[d]) {
      ++result.skipped_empty;
      continue;
    }
    result.per_doc.emplace_back(test.documents()[d].id, *slots[d]);
    averages.push_back(*slots[d]);
  }
  result.scored_docs = static_cast<int>(averages.size());
  if (averages.empty()) throw DataError("no non-empty test documents to score");
  // Summed in sorted order so the reported mean is invariant to document
  // order, bit for bit.
  std::sort(averages.begin(), averages.end());
  result.average = mean(averages);
  return result;
}

GridResult grid_search_cv(const Corpus& corpus, const ModelConfig& tmpl, int folds, Scheme scheme,
                          int jobs) {
  if (folds < 2) throw UsageError("grid search needs at least 2 folds");
  if (static_cast<int>(corpus.size()) < folds)
    throw DataError("grid search needs at least as many documents as folds");

  std::vector<Corpus> fold_train;
  std::vector<Corpus> fold_test;
  for (int f = 0; f < folds; ++f) {
    std::vector<Document> train_docs;
    std::vector<Document> test_docs;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      if (static_cast<int>(d % static_cast<std::size_t>(folds)) == f)
        test_docs.push_back(corpus.documents()[d]);
      else
        train_docs.push_back(corpus.documents()[d]);
    }
    fold_train.emplace_back(corpus.alphabet(), std::move(train_docs));
    fold_test.emplace_back(corpus.alphabet(), std::move(test_docs));
  }

  constexpr int kGridSide = static_cast<int>(std::size(kGridValues));
  const int cells = kGridSide * kGridSide;
  std::vector<double> scores(static_cast<std::size_t>(cells) * static_cast<std::size_t>(folds));
  parallel_for(jobs, scores.size(), [&](std::size_t task) {
    const int cell = static_cast<int>(task) / folds;
    const int fold = static_cast<int>(task) % folds;
    ModelConfig config = tmpl;
    config.alpha = kGridValues[cell / kGridSide];
    config.beta = kGridValues[cell % kGridSide];
    config.seed = derive_seed(tmpl.seed, static_cast<std::uint64_t>(task));
    const TrainedModel model = train_model(fold_train[static_cast<std::size_t>(fold)], config);
    scores[task] =
        eval_nextstep(model, fold_test[static_cast<std::size_t>(fold)], scheme, false).average;
  });

  GridResult result;
  int best = -1;
  for (int cell = 0; cell < cells; ++cell) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f)
      total += scores[static_cast<std::size_t>(cell) * static_cast<std::size_t>(folds) +
                      static_cast<std::size_t>(f)];
    GridCell entry;
    entry.alpha = kGridValues[cell / kGridSide];
    entry.beta = kGridValues[cell % kGridSide];
    entry.score = total / folds;
    result.cells.push_back(entry);
    if (best < 0 || entry.score > result.cells[static_cast<std::size_t>(best)].score)
      best = cell;
  }
  result.best_alpha = result.cells[static_cast<std::size_t>(best)].alpha;
  result.best_beta = result.cells[static_cast<std::size_t>(best)].beta;
  return result;
}

namespace {

// Replaces a sustain marker that has nothing to sustain (document start or
// right after SILENCE) with SILENCE so generated sequences stay mappable to
// the 25-symbol kernel alphabet.
int sanitize_orphan_continuations(Document& doc) {
  int fixed = 0;
  int last = -1;
  for (int& tok : doc.tokens) {
    if (tok == Alphabet::kContinuation && (last < 0 || last == Alphabet::kSilence)) {
      tok = Alphabet::kSilence;
      ++fixed;
    }
    if (tok != Alphabet::kContinuation) last = tok;
  }
  return fixed;
}

}  // namespace

MmdExperiment mmd_experiment(const TrainedModel& model, const Corpus& test, const Corpus* train,
                             const MmdOptions& opts) {
  if (opts.repeats < 1) throw UsageError("mmd needs at least 1 repeat");
  if (test.size() < 2) throw DataError("mmd needs at least 2 test documents");
  if (test.alphabet().size() != model.alphabet.size())
    throw DataError("test corpus alphabet differs from the model's");
  if (opts.mode == MmdMode::GivenZ && !model.is_topic())
    throw UsageError("given_z sampling needs a topic-family model");
  if (opts.mode == MmdMode::TrainVsTest && train == nullptr)
    throw UsageError("train_vs_test mode needs the training corpus");

  const bool melodic = test.alphabet().is_melodic();
  MmdExperiment experiment;
  int orphan_fixes = 0;
  const auto kernel_ready = [&](Document doc) {
    if (!melodic) return doc;
    orphan_fixes += sanitize_orphan_continuations(doc);
    return remap_continuation(doc, test.alphabet());
  };

  std::vector<Document> x_docs;
  for (const auto& doc : test.documents()) x_docs.push_back(kernel_ready(doc));

  KernelConfig kcfg;
  kcfg.window = opts.window;
  kcfg.max_mismatch = opts.max_mismatch;
  kcfg.alphabet_size = melodic ? Alphabet::melodic_remapped().size() : test.alphabet().size();

  for (int r = 0; r < opts.repeats; ++r) {
    const std::uint64_t repeat_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
    std::vector<Document> y_docs;
    if (opts.mode == MmdMode::TrainVsTest) {
      // A fresh draw of training documents per repeat, without replacement.
      if (train->size() < 2) throw DataError("train_vs_test needs at least 2 training documents");
      Rng rng(repeat_seed);
      std::vector<std::size_t> order(train->size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);
      const std::size_t take = std::min(test.size(), train->size());
      for (std::size_t i = 0; i < take; ++i)
        y_docs.push_back(kernel_ready(train->documents()[order[i]]));
    } else {
      for (std::size_t i = 0; i < test.size(); ++i) {
        const Document& target = test.documents()[i];
        const int len = static_cast<int>(target.length());
        const std::uint64_t doc_seed = derive_seed(repeat_seed, static_cast<std::uint64_t>(i));
        const std::string id = "sample_" + std::to_string(r) + "_" + std::to_string(i);
        Document sample;
        if (!model.is_topic()) {
          sample = model.dvmm().sample(len, doc_seed, id);
        } else if (opts.mode == MmdMode::Prior) {
          sample = model.topic().generate_prior(len, doc_seed, id);
        } else {
          const std::vector<int> z = model.topic().fold_in(target, model.config.sweeps,
                                                           derive_seed(doc_seed, 1));
          sample = model.topic().generate_given_z(z, derive_seed(doc_seed, 2), id);
        }
        y_docs.push_back(kernel_ready(std::move(sample)));
      }
    }
    GramMatrix g = gram(x_docs, y_docs, kcfg, true, opts.jobs);
    for (const auto& id : g.excluded)
      experiment.warnings.push_back("repeat " + std::to_string(r) + ": excluded '" + id +
                                    "' (self-kernel 0)");
    experiment.result.repeats.push_back(mmd2_unbiased(g));
    if (r == 0) {
      experiment.result.x_count = g.x_count;
      experiment.result.y_count = g.y_count;
    }
    experiment.grams.push_back(std::move(g));
  }
  if (orphan_fixes > 0)
    experiment.warnings.push_back("replaced " + std::to_string(orphan_fixes) +
                                  " orphan CONTINUATION token(s) with SILENCE before remapping");
  experiment.result.mean = mean(experiment.result.repeats);
  experiment.result.std_dev =
      experiment.result.repeats.size() > 1 ? sample_std(experiment.result.repeats) : 0.0;
  return experiment;
}

std::string InspectReport::scatter_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "topic";
  for (const auto& g : groups) out << ',' << g;
  out << '\n';
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out << k;
    for (double v : counts[k]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

InspectReport inspect_allocations(const TopicModel& model, const Corpus& corpus,
                                  const std::string& tag_key) {
  InspectReport report;
  std::vector<int> doc_group(model.doc_ids().size());
  for (std::size_t d = 0; d < model.doc_ids().size(); ++d) {
    const int c = corpus.find(model.doc_ids()[d]);
    if (c < 0)
      throw DataError("trained document '" + model.doc_ids()[d] + "' not found in the corpus");
    const auto& tags = corpus.documents()[static_cast<std::size_t>(c)].tags;
    const auto it = tags.find(tag_key);
    if (it == tags.end())
      throw DataError("document '" + model.doc_ids()[d] + "' has no tag '" + tag_key + "'");
    auto pos = std::find(report.groups.begin(), report.groups.end(), it->second);
    if (pos == report.groups.end()) {
      report.groups.push_back(it->second);
      pos = report.groups.end() - 1;
    }
    doc_group[d] = static_cast<int>(pos - report.groups.begin());
  }
  // Sort group labels, remapping the per-document indices.
  std::vector<std::string> sorted_groups = report.groups;
  std::sort(sorted_groups.begin(), sorted_groups.end());
  std::vector<int> remap(report.groups.size());
  for (std::size_t g = 0; g < report.groups.size(); ++g)
    remap[g] = static_cast<int>(std::find(sorted_groups.begin(), sorted_groups.end(),
                                          report.groups[g]) -
                                sorted_groups.begin());
  report.groups = std::move(sorted_groups);

  report.counts.assign(static_cast<std::size_t>(model.topics()),
                       std::vector<double>(report.groups.size(), 0.0));
  for (std::size_t d = 0; d < model.doc_ids().size(); ++d) {
    const std::size_t g = static_cast<std::size_t>(remap[static_cast<std::size_t>(doc_group[d])]);
    for (int k = 0; k < model.topics(); ++k)
      report.counts[static_cast<std::size_t>(k)][g] += model.doc_topic(static_cast<int>(d), k);
  }

  if (report.groups.size() >= 2) {
    std::vector<double> a(static_cast<std::size_t>(model.topics()));
    std::vector<double> b(static_cast<std::size_t>(model.topics()));
    for (int k = 0; k < model.topics(); ++k) {
      a[static_cast<std::size_t>(k)] = report.counts[static_cast<std::size_t>(k)][0];
      b[static_cast<std::size_t>(k)] = report.counts[static_cast<std::size_t>(k)][1];
    }
    report.pearson = pearson(a, b);
  } else {
    report.pearson = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace vargram
