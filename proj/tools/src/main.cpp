#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vargram/errors.hpp"
#include "vargram/harness.hpp"
#include "vargram/model_io.hpp"
#include "vargram/rng.hpp"
#include "vargram/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vargram;

namespace {

#ifndef VARGRAM_VERSION
#define VARGRAM_VERSION "0.0.0"
#endif

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "'");
  return f;
}

std::string digest_hex(const std::string& path) {
  std::ifstream f = open_input(path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string bytes = buf.str();
  std::ostringstream hex;
  hex << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(bytes);
  return hex.str();
}

Alphabet load_alphabet(const std::string& spec) {
  if (spec == "melodic") return Alphabet::melodic();
  if (spec == "melodic25") return Alphabet::melodic_remapped();
  std::ifstream f = open_input(spec);
  return Alphabet::load(f);
}

Corpus load_corpus(const std::string& path, const Alphabet& alphabet,
                   const std::string& tags_path) {
  std::ifstream f = open_input(path);
  Corpus corpus = parse_corpus(f, alphabet);
  if (!tags_path.empty()) {
    std::ifstream tf = open_input(tags_path);
    corpus = attach_tags(corpus, tf);
  }
  return corpus;
}

// Collects run metadata; every command writes one manifest at the end.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, std::string out_dir)
      : command_(std::move(command)), argv_(std::move(argv)), out_dir_(std::move(out_dir)) {
    fs::create_directories(out_dir_);
    start_ = std::chrono::steady_clock::now();
  }

  fs::path out() const { return out_dir_; }

  void input(const std::string& flag, const std::string& path) {
    inputs_.push_back({{"flag", flag}, {"path", path}, {"fnv1a64", digest_hex(path)}});
  }

  std::ofstream create(const std::string& name) {
    outputs_.push_back(name);
    const fs::path p = fs::path(out_dir_) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write '" + p.string() + "'");
    f << std::setprecision(17);
    return f;
  }

  void note(const json& key_values) {
    for (auto it = key_values.begin(); it != key_values.end(); ++it) notes_[it.key()] = it.value();
  }

  void finish() {
    const auto wall = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(wall);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest;
    manifest["command"] = command_;
    manifest["argv"] = argv_;
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    manifest["version"] = VARGRAM_VERSION;
    manifest["wall_clock_utc"] = stamp;
    manifest["elapsed_seconds"] = elapsed;
    for (auto it = notes_.begin(); it != notes_.end(); ++it) manifest[it.key()] = it.value();
    const fs::path p = fs::path(out_dir_) / "run_manifest.json";
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write '" + p.string() + "'");
    f << manifest.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::string out_dir_;
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
  json notes_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

struct CommonModelFlags {
  std::string family = "vargram";
  int depth = 5;
  double threshold = 1e-3;
  std::string tree_preset;
  int topics = 10;
  double alpha = 1.0;
  double beta = 1.0;
  int s = 10;
  int sweeps = 2000;
  int burn_in = 1000;

  ModelConfig to_config(std::optional<std::uint64_t> seed) const {
    ModelConfig c;
    c.family = parse_family(family);
    c.depth = depth;
    c.threshold = threshold;
    if (tree_preset == "sh") c.threshold = 1e-3;
    else if (tree_preset == "de") c.threshold = 1e-4;
    else if (!tree_preset.empty()) throw UsageError("--tree must be 'sh' or 'de'");
    c.topics = topics;
    c.alpha = alpha;
    c.beta = beta;
    c.s = s;
    c.sweeps = sweeps;
    c.burn_in = burn_in;
    c.seed = seed.value_or(0);
    return c;
  }
};

void add_model_flags(CLI::App* cmd, CommonModelFlags& f) {
  cmd->add_option("--family", f.family,
                  "model family: empmarg|dirbigram|dvmm|lda|topicbigram|vargram");
  cmd->add_option("--depth", f.depth, "max context depth L");
  auto* thr = cmd->add_option("--threshold", f.threshold, "context frequency threshold");
  auto* preset = cmd->add_option("--tree", f.tree_preset, "threshold preset: sh (1e-3) | de (1e-4)");
  thr->excludes(preset);
  preset->excludes(thr);
  cmd->add_option("--topics", f.topics, "number of topics K");
  cmd->add_option("--alpha", f.alpha, "document-topic concentration");
  cmd->add_option("--beta", f.beta, "word-distribution concentration");
  cmd->add_option("--s", f.s, "topic samples per prediction step");
  cmd->add_option("--sweeps", f.sweeps, "Gibbs sweeps");
  cmd->add_option("--burn-in", f.burn_in, "burn-in sweeps (recorded; training keeps the final state)");
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const char* why) {
  if (!seed) throw UsageError(std::string("--seed is required: ") + why);
  return *seed;
}

std::optional<std::uint64_t> given_seed(const CLI::Option* opt, std::uint64_t value) {
  if (opt == nullptr || opt->count() == 0) return std::nullopt;
  return value;
}

std::pair<int, int> parse_kernel(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) throw UsageError("--kernel expects 'k,m'");
  try {
    const int k = std::stoi(spec.substr(0, comma));
    const int m = std::stoi(spec.substr(comma + 1));
    return {k, m};
  } catch (const std::exception&) {
    throw UsageError("--kernel expects 'k,m' with integer k and m");
  }
}

std::string context_label(const std::vector<std::string>& names) {
  if (names.empty()) return "root";
  std::string label;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) label += '-';
    label += names[i];
  }
  return label;
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream f = open_input(path);
  return load_model(f);
}

void write_trace(Run& run, const std::vector<double>& trace) {
  if (trace.empty()) return;
  std::ofstream f = run.create("trace.csv");
  f << "sweep,joint_log_prob\n";
  for (std::size_t i = 0; i < trace.size(); ++i) f << (i + 1) << ',' << trace[i] << '\n';
}

// ---- command implementations -------------------------------------------

int cmd_train(const std::vector<std::string>& argv, const std::string& corpus_path,
              const std::string& alphabet_spec, const std::string& tags_path,
              const CommonModelFlags& flags, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  ModelConfig config = flags.to_config(seed);
  if (family_has_topics(config.family))
    config.seed = require_seed(seed, "topic-family training is randomized");
  Run run("train", argv, out_dir);
  run.input("--corpus", corpus_path);
  if (alphabet_spec != "melodic" && alphabet_spec != "melodic25")
    run.input("--alphabet", alphabet_spec);
  if (!tags_path.empty()) run.input("--tags", tags_path);

  const Alphabet alphabet = load_alphabet(alphabet_spec);
  const Corpus corpus = load_corpus(corpus_path, alphabet, tags_path);
  const TrainedModel model = train_model(corpus, config);

  {
    std::ofstream f = run.create("model.json");
    save_model(model, f);
  }
  write_trace(run, model.trace);
  run.note({{"family", std::string(family_name(model.config.family))},
            {"tree_nodes", model.tree().size()},
            {"documents", static_cast<int>(corpus.size())},
            {"tokens", corpus.total_tokens()},
            {"seed", model.config.seed}});
  run.finish();
  std::cout << "trained " << family_name(model.config.family) << ": " << corpus.size()
            << " docs, " << corpus.total_tokens() << " tokens, tree nodes "
            << model.tree().size() << "\n";
  return 0;
}

int cmd_eval(const std::vector<std::string>& argv, const std::string& model_path,
             const std::string& corpus_path, const std::string& scheme_name_arg, bool truncate,
             std::optional<std::uint64_t> seed, int jobs, const std::string& out_dir) {
  const Scheme scheme = parse_scheme(scheme_name_arg);
  Run run("eval", argv, out_dir);
  run.input("--model", model_path);
  run.input("--corpus", corpus_path);

  TrainedModel model = load_model_file(model_path);
  if (scheme != Scheme::Exact)
    model.config.seed = require_seed(seed, "s1/s2 scoring is randomized");
  const Corpus test = load_corpus(corpus_path, model.alphabet, "");
  const EvalResult result = eval_nextstep(model, test, scheme, truncate, jobs);

  {
    std::ofstream f = run.create("eval.csv");
    f << "doc_id,avg_loglik\n";
    for (const auto& [id, score] : result.per_doc) f << id << ',' << score << '\n';
  }
  run.note({{"family", std::string(family_name(model.config.family))},
            {"scheme", std::string(scheme_name(scheme))},
            {"truncate_half", truncate},
            {"avg_loglik", result.average},
            {"scored_docs", result.scored_docs},
            {"skipped_empty", result.skipped_empty}});
  run.finish();
  std::cout << "avg next-step log-likelihood " << std::setprecision(10) << result.average
            << " over " << result.scored_docs << " docs";
  if (result.skipped_empty > 0) std::cout << " (" << result.skipped_empty << " empty skipped)";
  std::cout << "\n";
  return 0;
}

int cmd_generate(const std::vector<std::string>& argv, const std::string& model_path,
                 const std::string& mode_name, int length, int count,
                 const std::string& corpus_path, std::optional<std::uint64_t> seed_opt,
                 const std::string& out_dir) {
  const std::uint64_t seed = require_seed(seed_opt, "generation is randomized");
  Run run("generate", argv, out_dir);
  run.input("--model", model_path);
  const TrainedModel model = load_model_file(model_path);

  std::vector<Document> samples;
  if (mode_name == "prior") {
    if (length < 0) throw UsageError("--length must be >= 0");
    if (count < 1) throw UsageError("--count must be >= 1");
    for (int i = 0; i < count; ++i) {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
      const std::string id = "sample_" + std::to_string(i);
      samples.push_back(model.is_topic() ? model.topic().generate_prior(length, s, id)
                                         : model.dvmm().sample(length, s, id));
    }
  } else if (mode_name == "given_z") {
    if (!model.is_topic()) throw UsageError("given_z generation needs a topic-family model");
    if (corpus_path.empty()) throw UsageError("given_z generation needs --corpus");
    run.input("--corpus", corpus_path);
    const Corpus source = load_corpus(corpus_path, model.alphabet, "");
    for (std::size_t i = 0; i < source.size(); ++i) {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
      const std::vector<int> z =
          model.topic().fold_in(source.documents()[i], model.config.sweeps, derive_seed(s, 1));
      samples.push_back(model.topic().generate_given_z(z, derive_seed(s, 2),
                                                       "sample_" + source.documents()[i].id));
    }
  } else {
    throw UsageError("--mode must be 'prior' or 'given_z'");
  }

  {
    std::ofstream f = run.create("samples.txt");
    serialize_corpus(Corpus(model.alphabet, samples), f);
  }
  run.note({{"mode", mode_name}, {"samples", static_cast<int>(samples.size())}, {"seed", seed}});
  run.finish();
  std::cout << "generated " << samples.size() << " sample(s)\n";
  return 0;
}

int cmd_mmd(const std::vector<std::string>& argv, const std::string& model_path,
            const std::string& corpus_path, const std::string& train_path,
            const std::string& kernel_spec, int repeats, const std::string& mode_name,
            std::optional<std::uint64_t> seed_opt, int jobs, const std::string& out_dir) {
  MmdOptions opts;
  std::tie(opts.window, opts.max_mismatch) = parse_kernel(kernel_spec);
  opts.repeats = repeats;
  opts.mode = parse_mmd_mode(mode_name);
  opts.seed = require_seed(seed_opt, "sampling is randomized");
  opts.jobs = jobs;

  Run run("mmd", argv, out_dir);
  run.input("--model", model_path);
  run.input("--corpus", corpus_path);
  if (!train_path.empty()) run.input("--train", train_path);

  const TrainedModel model = load_model_file(model_path);
  const Corpus test = load_corpus(corpus_path, model.alphabet, "");
  std::optional<Corpus> train;
  if (opts.mode == MmdMode::TrainVsTest) {
    if (train_path.empty()) throw UsageError("train_vs_test mode needs --train");
    train = load_corpus(train_path, model.alphabet, "");
  }
  const MmdExperiment experiment = mmd_experiment(model, test, train ? &*train : nullptr, opts);

  {
    std::ofstream f = run.create("mmd.csv");
    f << "repeat,mmd2\n";
    for (std::size_t r = 0; r < experiment.result.repeats.size(); ++r)
      f << r << ',' << experiment.result.repeats[r] << '\n';
  }
  for (std::size_t r = 0; r < experiment.grams.size(); ++r) {
    std::ofstream f = run.create("gram_" + std::to_string(r) + ".csv");
    f << experiment.grams[r].to_csv();
  }
  for (const auto& w : experiment.warnings) std::cerr << "warning: " << w << "\n";
  run.note({{"mode", mode_name},
            {"kernel", kernel_spec},
            {"mmd2_mean", experiment.result.mean},
            {"mmd2_std", experiment.result.std_dev},
            {"x_count", experiment.result.x_count},
            {"y_count", experiment.result.y_count},
            {"warnings", experiment.warnings},
            {"seed", opts.seed}});
  run.finish();
  std::cout << "mmd2 mean " << std::setprecision(10) << experiment.result.mean << " std "
            << experiment.result.std_dev << " over " << repeats << " repeats\n";
  return 0;
}

int cmd_grid(const std::vector<std::string>& argv, const std::string& corpus_path,
             const std::string& alphabet_spec, const CommonModelFlags& flags, int folds,
             const std::string& scheme_arg, std::optional<std::uint64_t> seed, int jobs,
             const std::string& out_dir) {
  ModelConfig tmpl = flags.to_config(seed);
  if (family_has_topics(tmpl.family))
    tmpl.seed = require_seed(seed, "topic-family training is randomized");
  const Scheme scheme =
      scheme_arg.empty() ? (family_has_topics(tmpl.family) ? Scheme::S1 : Scheme::Exact)
                         : parse_scheme(scheme_arg);
  Run run("grid", argv, out_dir);
  run.input("--corpus", corpus_path);
  if (alphabet_spec != "melodic" && alphabet_spec != "melodic25")
    run.input("--alphabet", alphabet_spec);

  const Alphabet alphabet = load_alphabet(alphabet_spec);
  const Corpus corpus = load_corpus(corpus_path, alphabet, "");
  const GridResult result = grid_search_cv(corpus, tmpl, folds, scheme, jobs);

  {
    std::ofstream f = run.create("grid.csv");
    f << "alpha,beta,score\n";
    for (const auto& cell : result.cells)
      f << cell.alpha << ',' << cell.beta << ',' << cell.score << '\n';
  }
  run.note({{"family", std::string(family_name(tmpl.family))},
            {"scheme", std::string(scheme_name(scheme))},
            {"folds", folds},
            {"best_alpha", result.best_alpha},
            {"best_beta", result.best_beta},
            {"seed", tmpl.seed}});
  run.finish();
  std::cout << "best alpha " << result.best_alpha << " beta " << result.best_beta << "\n";
  return 0;
}

int cmd_inspect(const std::vector<std::string>& argv, const std::string& model_path,
                const std::string& corpus_path, const std::string& tags_path,
                const std::string& tag_key, const std::vector<std::string>& phi_requests,
                const std::string& out_dir) {
  Run run("inspect", argv, out_dir);
  run.input("--model", model_path);
  const TrainedModel model = load_model_file(model_path);
  if (!model.is_topic()) throw UsageError("inspect needs a topic-family model");
  const TopicModel& tm = model.topic();

  if (!tag_key.empty()) {
    if (corpus_path.empty()) throw UsageError("--tag needs --corpus (for document tags)");
    run.input("--corpus", corpus_path);
    if (!tags_path.empty()) run.input("--tags", tags_path);
    const Corpus corpus = load_corpus(corpus_path, model.alphabet, tags_path);
    const InspectReport report = inspect_allocations(tm, corpus, tag_key);
    std::ofstream f = run.create("scatter.csv");
    f << report.scatter_csv();
    run.note({{"tag", tag_key},
              {"groups", report.groups},
              {"pearson", report.pearson}});
    std::cout << "allocation correlation across groups: " << std::setprecision(6)
              << report.pearson << "\n";
  }

  for (const auto& request : phi_requests) {
    const auto colon = request.find(':');
    if (colon == std::string::npos) throw UsageError("--phi expects 'topic:sym,sym,...'");
    int topic = 0;
    try {
      topic = std::stoi(request.substr(0, colon));
    } catch (const std::exception&) {
      throw UsageError("--phi expects an integer topic index");
    }
    if (topic < 0 || topic >= tm.topics()) throw UsageError("--phi topic index out of range");
    std::vector<std::string> names;
    std::vector<int> context;
    std::stringstream ctx(request.substr(colon + 1));
    std::string name;
    while (std::getline(ctx, name, ',')) {
      if (name.empty()) continue;
      const int idx = model.alphabet.index_of(name);
      if (idx < 0) throw DataError("unknown symbol '" + name + "' in --phi context");
      names.push_back(name);
      context.push_back(idx);
    }
    const int node = tm.tree().find_context(context);
    if (node < 0) throw DataError("context '" + context_label(names) + "' is not in the tree");
    const std::vector<double> phi = tm.phi_hat(node, topic);
    std::ofstream f =
        run.create("phi_" + std::to_string(topic) + "_" + context_label(names) + ".csv");
    f << "symbol,probability\n";
    for (int w = 0; w < model.alphabet.size(); ++w)
      f << model.alphabet.name(w) << ',' << phi[static_cast<std::size_t>(w)] << '\n';
  }
  run.finish();
  return 0;
}

int cmd_synth(const std::vector<std::string>& argv, const std::string& spec_path,
              std::optional<std::uint64_t> seed_opt, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(seed_opt, "synthesis is randomized");
  Run run("synth", argv, out_dir);
  run.input("--spec", spec_path);
  std::ifstream f = open_input(spec_path);
  SynthSpec spec = load_synth_spec(f);
  spec.seed = seed;
  const Corpus corpus = synth_corpus(spec);
  {
    std::ofstream out = run.create("corpus.txt");
    serialize_corpus(corpus, out);
  }
  {
    std::ofstream out = run.create("alphabet.txt");
    corpus.alphabet().save(out);
  }
  run.note({{"documents", static_cast<int>(corpus.size())},
            {"tokens", corpus.total_tokens()},
            {"seed", seed}});
  run.finish();
  std::cout << "synthesized " << corpus.size() << " docs, " << corpus.total_tokens()
            << " tokens\n";
  return 0;
}

int run(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream f = open_input(manifest_path);
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::exception& e) {
    throw DataError(std::string("cannot parse manifest: ") + e.what());
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array())
    throw DataError("manifest has no argv record");
  std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv[0] == "replay") throw UsageError("cannot replay a replay");
  // Redirect --out to the requested directory.
  bool redirected = false;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (argv[i] == "--out" && i + 1 < argv.size()) {
      argv[i + 1] = out_dir;
      redirected = true;
    } else if (argv[i].rfind("--out=", 0) == 0) {
      argv[i] = "--out=" + out_dir;
      redirected = true;
    }
  }
  if (!redirected) throw DataError("manifest argv has no --out flag");
  return run(argv);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"variable-order topic models over token sequences"};
  app.set_version_flag("--version", VARGRAM_VERSION);
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "fit a model and write a model file");
  std::string train_corpus, train_alphabet, train_tags, train_out;
  CommonModelFlags train_flags;
  std::uint64_t train_seed = 0;
  train->add_option("--corpus", train_corpus, "training corpus file")->required();
  train->add_option("--alphabet", train_alphabet, "alphabet file, or 'melodic'/'melodic25'")
      ->required();
  train->add_option("--tags", train_tags, "sidecar tag file");
  add_model_flags(train, train_flags);
  auto* train_seed_opt = train->add_option("--seed", train_seed, "RNG seed");
  train->add_option("--out", train_out, "output directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "next-step log-likelihood on a test corpus");
  std::string eval_model, eval_corpus, eval_scheme = "exact", eval_out;
  bool eval_truncate = false;
  std::uint64_t eval_seed = 0;
  int eval_jobs = 1;
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--corpus", eval_corpus, "test corpus file")->required();
  eval->add_option("--scheme", eval_scheme, "exact|s1|s2");
  eval->add_flag("--truncate-half", eval_truncate, "score only the first half of each doc");
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "RNG seed (required for s1/s2)");
  eval->add_option("--jobs", eval_jobs, "parallel scoring threads");
  eval->add_option("--out", eval_out, "output directory")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "sample documents from a trained model");
  std::string gen_model, gen_mode = "prior", gen_corpus, gen_out;
  int gen_length = 0, gen_count = 1;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "model file")->required();
  gen->add_option("--mode", gen_mode, "prior|given_z");
  gen->add_option("--length", gen_length, "sample length (prior mode)");
  gen->add_option("--count", gen_count, "number of samples (prior mode)");
  gen->add_option("--corpus", gen_corpus, "allocation source documents (given_z mode)");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // mmd
  auto* mmd = app.add_subcommand("mmd", "MMD between test docs and model samples");
  std::string mmd_model, mmd_corpus, mmd_train, mmd_kernel = "4,1", mmd_mode = "prior", mmd_out;
  int mmd_repeats = 20, mmd_jobs = 1;
  std::uint64_t mmd_seed = 0;
  mmd->add_option("--model", mmd_model, "model file")->required();
  mmd->add_option("--corpus", mmd_corpus, "test corpus file")->required();
  mmd->add_option("--train", mmd_train, "training corpus (train_vs_test mode)");
  mmd->add_option("--kernel", mmd_kernel, "mismatch kernel 'k,m'");
  mmd->add_option("--repeats", mmd_repeats, "sampling repeats");
  mmd->add_option("--mode", mmd_mode, "prior|given_z|train_vs_test");
  auto* mmd_seed_opt = mmd->add_option("--seed", mmd_seed, "RNG seed");
  mmd->add_option("--jobs", mmd_jobs, "parallel Gram threads");
  mmd->add_option("--out", mmd_out, "output directory")->required();

  // grid
  auto* grid = app.add_subcommand("grid", "cross-validated (alpha, beta) grid search");
  std::string grid_corpus, grid_alphabet, grid_scheme, grid_out;
  CommonModelFlags grid_flags;
  int grid_folds = 10, grid_jobs = 1;
  std::uint64_t grid_seed = 0;
  grid->add_option("--corpus", grid_corpus, "corpus file")->required();
  grid->add_option("--alphabet", grid_alphabet, "alphabet file, or 'melodic'/'melodic25'")
      ->required();
  add_model_flags(grid, grid_flags);
  grid->add_option("--folds", grid_folds, "cross-validation folds");
  grid->add_option("--scheme", grid_scheme, "scoring scheme (default: s1 for topics, else exact)");
  auto* grid_seed_opt = grid->add_option("--seed", grid_seed, "RNG seed");
  grid->add_option("--jobs", grid_jobs, "parallel (cell, fold) threads");
  grid->add_option("--out", grid_out, "output directory")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "allocation scatter and phi reports");
  std::string ins_model, ins_corpus, ins_tags, ins_tag, ins_out;
  std::vector<std::string> ins_phi;
  inspect->add_option("--model", ins_model, "model file")->required();
  inspect->add_option("--corpus", ins_corpus, "training corpus (for tags)");
  inspect->add_option("--tags", ins_tags, "sidecar tag file");
  inspect->add_option("--tag", ins_tag, "tag key to split allocation counts by");
  inspect->add_option("--phi", ins_phi,
                      "phi report request 'topic:sym,sym,...' (empty context = root)");
  inspect->add_option("--out", ins_out, "output directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a corpus from a planted model spec");
  std::string synth_spec, synth_out;
  std::uint64_t synth_seed = 0;
  synth->add_option("--spec", synth_spec, "planted model JSON")->required();
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  std::string replay_manifest, replay_out;
  replay->add_option("--manifest", replay_manifest, "run_manifest.json of the original run")
      ->required();
  replay->add_option("--out", replay_out, "output directory for the replayed run")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*train)
    return cmd_train(args, train_corpus, train_alphabet, train_tags, train_flags,
                     given_seed(train_seed_opt, train_seed), train_out);
  if (*eval)
    return cmd_eval(args, eval_model, eval_corpus, eval_scheme, eval_truncate,
                    given_seed(eval_seed_opt, eval_seed), eval_jobs, eval_out);
  if (*gen)
    return cmd_generate(args, gen_model, gen_mode, gen_length, gen_count, gen_corpus,
                        given_seed(gen_seed_opt, gen_seed), gen_out);
  if (*mmd)
    return cmd_mmd(args, mmd_model, mmd_corpus, mmd_train, mmd_kernel, mmd_repeats, mmd_mode,
                   given_seed(mmd_seed_opt, mmd_seed), mmd_jobs, mmd_out);
  if (*grid)
    return cmd_grid(args, grid_corpus, grid_alphabet, grid_flags, grid_folds, grid_scheme,
                    given_seed(grid_seed_opt, grid_seed), grid_jobs, grid_out);
  if (*inspect)
    return cmd_inspect(args, ins_model, ins_corpus, ins_tags, ins_tag, ins_phi, ins_out);
  if (*synth) return cmd_synth(args, synth_spec, given_seed(synth_seed_opt, synth_seed), synth_out);
  if (*replay) return cmd_replay(replay_manifest, replay_out);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
