// framepool — learned frame pooling pipeline.
//
// Subcommands cover the full loop: synth (make a corpus), preprocess
// (sort + resample), train (alternating SVM/LP optimization), predict,
// evaluate (AP / mAP), baseline (fixed pooling weights), weights (dump
// the learned-theta trace).
//
// Exit codes: 0 success, 2 usage or input-format errors, 1 internal
// errors (solver failures, I/O trouble).

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "framepool/core.hpp"
#include "framepool/eval.hpp"
#include "framepool/lp.hpp"
#include "framepool/pooling.hpp"
#include "framepool/preprocess.hpp"
#include "framepool/store.hpp"
#include "framepool/svm.hpp"
#include "framepool/synth.hpp"
#include "framepool/trainer.hpp"

namespace fs = std::filesystem;
using namespace framepool;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

std::string fixed6(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << value;
  return out.str();
}

void check_id_is_filename_safe(const std::string& video_id) {
  if (video_id.empty() || video_id.find('/') != std::string::npos ||
      video_id.find('\\') != std::string::npos) {
    throw ValidationError("video_id '" + video_id +
                          "' cannot be used as a file name");
  }
}

int worker_count(std::size_t jobs) {
  unsigned cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("FRAMEPOOL_THREADS")) {
    int requested = 0;
    try {
      requested = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError("FRAMEPOOL_THREADS must be a positive integer, got '" +
                        std::string(env) + "'");
    }
    if (requested < 1) {
      throw ConfigError("FRAMEPOOL_THREADS must be a positive integer, got '" +
                        std::string(env) + "'");
    }
    cap = static_cast<unsigned>(requested);
  }
  return static_cast<int>(std::min<std::size_t>(cap, jobs));
}

// ----------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string manifest;
  std::string out_dir;
  int frames = 20;
  std::string mode = "auto";
};

void run_preprocess(const PreprocessArgs& args) {
  const Manifest manifest = read_manifest(args.manifest);
  const fs::path base = fs::path(args.manifest).parent_path();
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  PreprocessOptions options;
  options.target_length = args.frames;
  options.mode = interpolation_mode_from_string(args.mode);

  Manifest out_manifest;
  for (const auto& entry : manifest.entries) {
    check_id_is_filename_safe(entry.video_id);
    FrameFeatureSequence seq = read_video_features(base / entry.path);
    seq.video_id = entry.video_id;
    const ResampledFeatureMatrix resampled = preprocess_sequence(seq, options);

    FrameFeatureSequence out_seq;
    out_seq.video_id = entry.video_id;
    out_seq.values = resampled.X;
    const std::string file_name = entry.video_id + ".csv";
    write_video_features(out_dir / file_name, out_seq);

    ManifestEntry out_entry = entry;
    out_entry.path = file_name;
    out_manifest.entries.push_back(std::move(out_entry));
  }
  write_manifest(out_dir / "manifest.jsonl", out_manifest);
  std::cout << "preprocessed " << out_manifest.entries.size() << " videos ("
            << args.frames << " frames, " << args.mode << " mode) into "
            << out_dir.string() << "\n";
}

// ----------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data_dir;
  std::string event;
  std::string events;
  int iters = 100;
  std::uint64_t seed = 0;
  double C = 1.0;
  double early_stop_tol = 1e-7;
  bool standardize = false;
  std::string out = "model.json";
  std::string out_dir = "models";
};

std::string summarize(const TrainedModel& model) {
  std::ostringstream out;
  out << "event " << model.event_id << "\n"
      << "  iterations: " << model.trace.size() << "\n"
      << "  objective:  " << fixed6(model.objective) << "\n";
  Eigen::Index argmax = 0;
  model.theta.theta.maxCoeff(&argmax);
  out << "  theta argmax: k=" << (argmax + 1) << " ("
      << fixed6(model.theta.theta[argmax]) << ")\n"
      << "  theta:";
  for (Eigen::Index k = 0; k < model.theta.theta.size(); ++k) {
    out << ' ' << std::fixed << std::setprecision(4)
        << model.theta.theta[k];
  }
  out << "\n";
  return out.str();
}

TrainedModel train_one(const fs::path& manifest_path,
                       const std::string& event_id, const TrainArgs& args,
                       const fs::path& model_path) {
  LabeledDataset dataset = load_dataset(manifest_path, event_id, "train");
  TrainerConfig config;
  config.T = dataset.column_count();
  config.N = args.iters;
  config.C = args.C;
  config.seed = args.seed;
  config.early_stop_tol = args.early_stop_tol;
  config.svm.standardize = args.standardize;

  ModelFile file;
  file.config = config;
  file.model = train_event(dataset, config);
  write_model(model_path, file);
  return file.model;
}

int run_train(const TrainArgs& args) {
  if (args.event.empty() == args.events.empty()) {
    throw ConfigError("pass exactly one of --event <id> or --events all");
  }
  const fs::path manifest_path = fs::path(args.data_dir) / "manifest.jsonl";

  if (!args.event.empty()) {
    const TrainedModel model =
        train_one(manifest_path, args.event, args, args.out);
    std::cout << summarize(model) << "model written to " << args.out << "\n";
    return kExitOk;
  }

  if (args.events != "all") {
    throw ConfigError("--events only accepts 'all', got '" + args.events +
                      "'");
  }
  const std::vector<std::string> events =
      read_manifest(manifest_path).event_ids();
  if (events.empty()) {
    throw ValidationError("manifest contains no event labels");
  }
  fs::create_directories(args.out_dir);

  struct EventResult {
    std::string summary;
    std::string error;
    bool internal = false;
  };
  std::vector<EventResult> results(events.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= events.size()) return;
      try {
        const fs::path model_path =
            fs::path(args.out_dir) / (events[i] + ".json");
        const TrainedModel model =
            train_one(manifest_path, events[i], args, model_path);
        results[i].summary = summarize(model) + "model written to " +
                             model_path.string() + "\n";
      } catch (const SolverError& e) {
        results[i].error = e.what();
        results[i].internal = true;
      } catch (const std::runtime_error& e) {
        results[i].error = e.what();
      }
    }
  };

  const int workers = worker_count(events.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& thread : pool) thread.join();

  int exit_code = kExitOk;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (results[i].error.empty()) {
      std::cout << results[i].summary;
      continue;
    }
    std::cerr << "error: event " << events[i] << ": " << results[i].error
              << "\n";
    if (results[i].internal) {
      exit_code = kExitInternal;
    } else if (exit_code == kExitOk) {
      exit_code = kExitUsage;
    }
  }
  return exit_code;
}

// ----------------------------------------------------------------------
// predict / evaluate / baseline

struct PredictArgs {
  std::string model;
  std::string data_dir;
  std::string split = "test";
  std::string out;
};

void run_predict(const PredictArgs& args) {
  const ModelFile file = read_model(args.model);
  const LabeledDataset dataset =
      load_dataset(fs::path(args.data_dir) / "manifest.jsonl",
                   file.model.event_id, args.split);

  std::vector<ScoredItem> ranked;
  ranked.reserve(dataset.size());
  for (const auto& item : dataset.items) {
    ScoredItem scored;
    scored.video_id = item.features.video_id;
    scored.score = decision_score(file.model.model, file.model.theta,
                                  item.features);
    scored.label = item.label;
    ranked.push_back(std::move(scored));
  }
  sort_ranked(ranked);
  write_scores(args.out, ranked);
  std::cout << "wrote " << ranked.size() << " scores to " << args.out << "\n";
}

void run_evaluate(const std::vector<std::string>& score_files) {
  std::map<std::string, double> per_file;
  for (const auto& file : score_files) {
    const double ap = average_precision(read_scores(file));
    per_file[file] = ap;
    std::cout << "AP " << file << " = " << fixed6(ap) << "\n";
  }
  if (per_file.size() > 1) {
    std::cout << "mAP = " << fixed6(mean_ap(per_file)) << "\n";
  }
}

struct BaselineArgs {
  std::string data_dir;
  std::string event;
  std::string method = "average";
  double C = 1.0;
  bool standardize = false;
  std::string out;
};

void run_baseline(const BaselineArgs& args) {
  const fs::path manifest_path = fs::path(args.data_dir) / "manifest.jsonl";
  const LabeledDataset train = load_dataset(manifest_path, args.event,
                                            "train");
  const PoolingWeights theta = baseline_weights(
      pooling_kind_from_string(args.method),
      static_cast<int>(train.column_count()));

  Eigen::MatrixXd samples(static_cast<Eigen::Index>(train.size()),
                          train.feature_dim());
  std::vector<int> labels;
  labels.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    samples.row(static_cast<Eigen::Index>(i)) =
        pool(train.items[i].features, theta).transpose();
    labels.push_back(train.items[i].label);
  }
  SvmConfig svm_config;
  svm_config.C = args.C;
  svm_config.standardize = args.standardize;
  const HyperplaneModel model = train_svm(samples, labels, svm_config);

  const LabeledDataset test = load_dataset(manifest_path, args.event, "test");
  std::vector<ScoredItem> ranked;
  ranked.reserve(test.size());
  for (const auto& item : test.items) {
    ScoredItem scored;
    scored.video_id = item.features.video_id;
    scored.score = decision_score(model, theta, item.features);
    scored.label = item.label;
    ranked.push_back(std::move(scored));
  }
  sort_ranked(ranked);
  const double ap = average_precision(ranked);
  std::cout << "baseline " << args.method << " AP = " << fixed6(ap) << "\n";
  if (!args.out.empty()) {
    write_scores(args.out, ranked);
    std::cout << "wrote " << ranked.size() << " scores to " << args.out
              << "\n";
  }
}

// ----------------------------------------------------------------------
// synth / weights

struct SynthArgs {
  std::string out_dir;
  std::string event = "E001";
  int n_pos = 100;
  int n_neg = 100;
  int m = 20;
  int min_frames = 15;
  int max_frames = 40;
  int component = 1;
  double q = 0.5;
  double strength = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& args) {
  SynthSpec spec;
  spec.n_pos = args.n_pos;
  spec.n_neg = args.n_neg;
  spec.m = args.m;
  spec.min_frames = args.min_frames;
  spec.max_frames = args.max_frames;
  spec.signal_component = args.component;
  spec.signal_quantile = args.q;
  spec.signal_strength = args.strength;
  spec.noise_sigma = args.sigma;

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  Manifest manifest;
  for (const std::string split : {"train", "test"}) {
    SynthSpec split_spec = spec;
    split_spec.seed = split == "train" ? args.seed : args.seed + 1;
    const SynthCorpus corpus = generate(split_spec);
    for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
      FrameFeatureSequence seq = corpus.sequences[i];
      seq.video_id = split + "_" + seq.video_id;
      const std::string file_name = seq.video_id + ".csv";
      write_video_features(out_dir / file_name, seq);

      ManifestEntry entry;
      entry.video_id = seq.video_id;
      entry.path = file_name;
      entry.labels[args.event] = corpus.labels[i];
      entry.split = split;
      manifest.entries.push_back(std::move(entry));
    }
  }
  write_manifest(out_dir / "manifest.jsonl", manifest);
  std::cout << "wrote " << manifest.entries.size() << " videos to "
            << out_dir.string() << "\n";
}

struct WeightsArgs {
  std::string model;
  std::string out;
};

void run_weights(const WeightsArgs& args) {
  const ModelFile file = read_model(args.model);
  write_weights_csv(args.out, file.model.trace);
  std::size_t rows = 0;
  for (const auto& entry : file.model.trace) {
    rows += static_cast<std::size_t>(entry.theta.theta.size());
  }
  std::cout << "wrote " << rows << " weight rows to " << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned frame pooling for event detection"};
  app.require_subcommand(1);

  PreprocessArgs pre_args;
  auto* pre = app.add_subcommand(
      "preprocess", "sort, interpolate and resample raw feature CSVs");
  pre->add_option("manifest", pre_args.manifest, "input manifest (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  pre->add_option("out_dir", pre_args.out_dir, "output directory")
      ->required();
  pre->add_option("--frames", pre_args.frames, "resampled frame count T")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  pre->add_option("--mode", pre_args.mode, "interpolation mode")
      ->check(CLI::IsMember({"lagrange", "linear", "auto"}))
      ->capture_default_str();

  TrainArgs train_args;
  auto* train = app.add_subcommand(
      "train", "alternating SVM/LP training for one event or all events");
  train->add_option("data_dir", train_args.data_dir,
                    "directory with manifest.jsonl + preprocessed CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--event", train_args.event, "event id to train");
  train->add_option("--events", train_args.events,
                    "'all' to train every labeled event");
  train->add_option("--iters", train_args.iters, "iteration budget N")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  train->add_option("--seed", train_args.seed, "weight init seed")
      ->capture_default_str();
  train->add_option("--C", train_args.C, "hinge penalty C")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--early-stop-tol", train_args.early_stop_tol,
                    "stop when a full iteration improves less than this "
                    "(0 disables)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train->add_flag("--standardize", train_args.standardize,
                  "standardize pooled features inside the SVM");
  train->add_option("--out", train_args.out, "model output (single event)")
      ->capture_default_str();
  train->add_option("--out-dir", train_args.out_dir,
                    "model output directory (--events all)")
      ->capture_default_str();

  PredictArgs predict_args;
  auto* predict =
      app.add_subcommand("predict", "score a split with a trained model");
  predict->add_option("model", predict_args.model, "model JSON")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("data_dir", predict_args.data_dir,
                      "directory with manifest.jsonl + preprocessed CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  predict->add_option("--split", predict_args.split, "split to score")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  predict->add_option("--out", predict_args.out, "ranked scores CSV")
      ->required();

  std::vector<std::string> score_files;
  auto* evaluate = app.add_subcommand(
      "evaluate", "average precision of ranked score files (mAP if several)");
  evaluate->add_option("scores", score_files, "score CSV file(s)")
      ->required()
      ->check(CLI::ExistingFile);

  BaselineArgs baseline_args;
  auto* baseline = app.add_subcommand(
      "baseline", "train + evaluate a fixed pooling strategy");
  baseline->add_option("data_dir", baseline_args.data_dir,
                       "directory with manifest.jsonl + preprocessed CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  baseline->add_option("--event", baseline_args.event, "event id")
      ->required();
  baseline->add_option("--method", baseline_args.method, "pooling strategy")
      ->check(CLI::IsMember({"average", "max", "median", "min"}))
      ->capture_default_str();
  baseline->add_option("--C", baseline_args.C, "hinge penalty C")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  baseline->add_flag("--standardize", baseline_args.standardize,
                     "standardize pooled features inside the SVM");
  baseline->add_option("--out", baseline_args.out,
                       "optional ranked scores CSV");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "generate a seeded synthetic corpus (train + test splits)");
  synth->add_option("out_dir", synth_args.out_dir, "output directory")
      ->required();
  synth->add_option("--event", synth_args.event, "event id for the labels")
      ->capture_default_str();
  synth->add_option("--n-pos", synth_args.n_pos, "positives per split")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--n-neg", synth_args.n_neg, "negatives per split")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--m", synth_args.m, "feature dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--min-frames", synth_args.min_frames, "shortest video")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--max-frames", synth_args.max_frames, "longest video")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--component", synth_args.component,
                    "1-based feature component carrying the signal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--q", synth_args.q,
                    "order-statistic quantile of the planted signal")
      ->capture_default_str();
  synth->add_option("--strength", synth_args.strength, "signal strength")
      ->capture_default_str();
  synth->add_option("--sigma", synth_args.sigma, "noise sigma")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed,
                    "train-split seed (test split uses seed + 1)")
      ->capture_default_str();

  WeightsArgs weights_args;
  auto* weights = app.add_subcommand(
      "weights", "dump a model's theta trace as iteration,k,theta_k CSV");
  weights->add_option("model", weights_args.model, "model JSON")
      ->required()
      ->check(CLI::ExistingFile);
  weights->add_option("--out", weights_args.out, "weights CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre->parsed()) {
      run_preprocess(pre_args);
    } else if (train->parsed()) {
      return run_train(train_args);
    } else if (predict->parsed()) {
      run_predict(predict_args);
    } else if (evaluate->parsed()) {
      run_evaluate(score_files);
    } else if (baseline->parsed()) {
      run_baseline(baseline_args);
    } else if (synth->parsed()) {
      run_synth(synth_args);
    } else if (weights->parsed()) {
      run_weights(weights_args);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
