#ifndef MOTION_CODE_CLI_HPP
#define MOTION_CODE_CLI_HPP

// The motion-code command line: train, classify, forecast, timestamps, bench,
// plus the split and noise helpers used to prepare forecasting and noisy
// benchmark data. run_cli is the whole program minus process plumbing, so
// tests drive it in-process.
//
// Exit codes: 0 success, 1 input error (bad flags, unreadable or invalid
// data, model mismatch), 2 numerical failure, 3 a bench check failed.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "json.hpp"

#include "motion_code/acceptance.hpp"
#include "motion_code/motion_code.hpp"

namespace motion_code::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity from MOTIONCODE_LOG (error, warn, info, debug); default warn.
inline LogLevel log_level_from_env() {
  const char *v = std::getenv("MOTIONCODE_LOG");
  if (v == nullptr) {
    return LogLevel::warn;
  }
  const std::string s(v);
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

class Logger {
public:
  Logger(std::ostream &err, LogLevel level) : err_(err), level_(level) {}
  void info(const std::string &msg) const { write(LogLevel::info, "info", msg); }
  void debug(const std::string &msg) const { write(LogLevel::debug, "debug", msg); }
  void warn(const std::string &msg) const { write(LogLevel::warn, "warning", msg); }

private:
  void write(LogLevel at, const char *tag, const std::string &msg) const {
    if (static_cast<int>(level_) >= static_cast<int>(at)) {
      err_ << tag << ": " << msg << '\n';
    }
  }
  std::ostream &err_;
  LogLevel level_;
};

inline json hyper_json(const Hyperparams &h) {
  return {{"m", h.m},         {"d", h.d},           {"J", h.J},
          {"lambda", h.lambda}, {"sigma", h.sigma},   {"max_iters", h.max_iters},
          {"epsilon", h.epsilon}, {"jitter", h.jitter}, {"seed", h.seed}};
}

namespace detail {

/// Training data plus the original label of each class.
struct Labeled {
  Dataset dataset;
  std::vector<double> class_labels;
};

inline std::vector<double> identity_labels(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = static_cast<double>(k);
  }
  return out;
}

inline Labeled load_labeled(const std::string &path, const std::string &format,
                            const Normalization &norm = {},
                            const std::vector<double> &label_order = {}) {
  if (format == "ucr") {
    const UcrFile file = read_ucr(fs::path(path), label_order);
    try {
      return {make_dataset(file.records, norm), file.original_labels};
    } catch (const InputError &) {
      motion_code::detail::rethrow_located(path + ": ");
    }
  }
  Dataset ds = load_ragged(path, norm);
  auto labels = identity_labels(ds.num_classes());
  return {std::move(ds), std::move(labels)};
}

/// Raw records of a query/test file, labels mapped like the training data.
inline std::vector<RaggedRecord> load_records(const std::string &path,
                                              const std::string &format,
                                              const std::vector<double> &label_order) {
  if (format == "ucr") {
    return read_ucr(fs::path(path), label_order).records;
  }
  return read_ragged(fs::path(path)).records;
}

/// Loads training data the way the model saw it and checks it is the same data.
inline Labeled load_training_for(const ModelFile &model, const std::string &path,
                                 const std::string &format) {
  const auto &p = model.params;
  Labeled data = load_labeled(path, format, {p.time_scale, p.value_scale},
                              format == "ucr" ? model.class_labels : std::vector<double>{});
  if (model.training_digest && *model.training_digest != dataset_digest(data.dataset)) {
    throw ValidationError(path + ": training data does not match the model (digest " +
                          dataset_digest(data.dataset) + ", model expects " +
                          *model.training_digest + ")");
  }
  check_model_matches(p, data.dataset);
  return data;
}

inline void check_label(int label, std::size_t classes, std::size_t record) {
  if (label < 0 || label >= static_cast<int>(classes)) {
    throw LookupError("record " + std::to_string(record + 1) + ": unknown class id " +
                      std::to_string(label));
  }
}

/// Record timestamps mapped with the model's time scale, allowing values up
/// to `max_time` for forecasting windows beyond the training range.
inline Eigen::VectorXd normalized_times(const RaggedRecord &r, const TimeScale &ts,
                                        double max_time, std::size_t record) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(r.t.size()));
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    const double v = (r.t[i] - ts.t_min) / ts.span();
    if (!(v >= 0.0 && v <= max_time)) {
      throw RangeError("record " + std::to_string(record + 1) + ": time " +
                       std::to_string(r.t[i]) + " outside the model's range [" +
                       std::to_string(ts.t_min) + ", " +
                       std::to_string(ts.to_original(max_time)) + "]");
    }
    t[static_cast<Eigen::Index>(i)] = v;
  }
  return t;
}

inline Eigen::VectorXd normalized_values(const RaggedRecord &r, const ValueScale &vs) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(r.y.size()));
  for (std::size_t i = 0; i < r.y.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = vs.normalize(r.y[i]);
  }
  return y;
}

inline json to_json(const Eigen::VectorXd &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline void write_json(const json &j, const std::string &path, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) {
    throw InputError("cannot write " + path);
  }
  f << j.dump(2) << '\n';
  if (!f) {
    throw InputError("failed writing " + path);
  }
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::string format_label(double label) {
  if (label == std::round(label) && std::abs(label) < 1e15) {
    return std::to_string(static_cast<long long>(label));
  }
  return json(label).dump();
}

inline void write_ucr(const fs::path &path, const std::vector<RaggedRecord> &records,
                      const std::vector<double> &original_labels) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  for (const auto &r : records) {
    out << format_label(original_labels.at(static_cast<std::size_t>(r.label)));
    for (double y : r.y) {
      out << '\t' << json(y).dump();
    }
    out << '\n';
  }
  if (!out) {
    throw InputError("failed writing " + path.string());
  }
}

} // namespace detail

struct TrainFlags {
  std::string data;
  std::string format = "ragged";
  std::string out;
  std::string report;
  Hyperparams hyper;
  int threads = 1;
};

inline int cmd_train(const TrainFlags &f, std::ostream &out, const Logger &log) {
  const auto start = std::chrono::steady_clock::now();
  f.hyper.validate();
  const auto data = detail::load_labeled(f.data, f.format);
  log.info("loaded " + std::to_string(data.dataset.num_classes()) + " classes, " +
           std::to_string(data.dataset.total_points()) + " points from " + f.data);
  const TrainResult trained = train(data.dataset, f.hyper, f.threads);
  ModelFile model;
  model.params = trained.params;
  model.class_labels = data.class_labels;
  model.training_digest = dataset_digest(data.dataset);
  save_model(f.out, model);
  const auto &t = trained.trace;
  out << "final loss " << json(t.loss).dump() << '\n'
      << "iterations " << t.iterations << '\n'
      << "stop_reason " << to_string(t.stop_reason) << '\n';
  if (!f.report.empty()) {
    json loss_history = t.loss_history;
    detail::write_json({{"command", "train"},
                        {"hyperparameters", hyper_json(f.hyper)},
                        {"wall_clock_seconds", detail::seconds_since(start)},
                        {"final_loss", t.loss},
                        {"iterations", t.iterations},
                        {"stop_reason", to_string(t.stop_reason)},
                        {"loss_history", loss_history},
                        {"model", f.out}},
                       f.report, out);
  }
  return kExitOk;
}

struct EvalFlags {
  std::string model;
  std::string data;
  std::string test;
  std::string format = "ragged";
  std::string out;
  int threads = 1;
};

inline int cmd_classify(const EvalFlags &f, std::ostream &out, const Logger &log) {
  const auto start = std::chrono::steady_clock::now();
  const ModelFile model = load_model(f.model);
  const auto &p = model.params;
  const auto data = detail::load_training_for(model, f.data, f.format);
  const auto posts = fit_all_posteriors(p, data.dataset, f.threads);
  const auto records = detail::load_records(f.test, f.format, data.class_labels);
  const std::size_t classes = p.num_classes();
  log.info("classifying " + std::to_string(records.size()) + " series");

  std::vector<std::vector<int>> confusion(classes, std::vector<int>(classes, 0));
  json series = json::array();
  int correct = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    detail::check_label(r.label, classes, i);
    const Eigen::VectorXd t = detail::normalized_times(r, p.time_scale, 1.0, i);
    const Eigen::VectorXd y = detail::normalized_values(r, p.value_scale);
    const Classification c = classify(p, posts, t, y);
    correct += c.label == r.label ? 1 : 0;
    ++confusion[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(c.label)];
    // Distances in original units.
    series.push_back({{"index", i},
                      {"true_label", r.label},
                      {"predicted_label", c.label},
                      {"distances", detail::to_json(c.distances * p.value_scale.scale)}});
  }
  const double accuracy =
      records.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(records.size());
  detail::write_json({{"command", "classify"},
                      {"hyperparameters", hyper_json(p.hyper)},
                      {"wall_clock_seconds", detail::seconds_since(start)},
                      {"class_labels", data.class_labels},
                      {"accuracy", accuracy},
                      {"correct", correct},
                      {"total", records.size()},
                      {"confusion", confusion},
                      {"series", series}},
                     f.out, out);
  return kExitOk;
}

/// Per-class RMSE in original units for Motion Code (the class's predicted
/// mean) and Last-Seen (each series' final training value), with every test
/// point dumped. Test series pair with training series of the same class in
/// file order.
inline int cmd_forecast(const EvalFlags &f, std::ostream &out, const Logger &log) {
  const auto start = std::chrono::steady_clock::now();
  const ModelFile model = load_model(f.model);
  const auto &p = model.params;
  const auto data = detail::load_training_for(model, f.data, f.format);
  const auto records = detail::load_records(f.test, f.format, data.class_labels);
  const std::size_t classes = p.num_classes();
  const auto &vs = p.value_scale;

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < records.size(); ++i) {
    detail::check_label(records[i].label, classes, i);
    by_class[static_cast<std::size_t>(records[i].label)].push_back(i);
  }
  json class_rows = json::array();
  json points = json::array();
  for (std::size_t k = 0; k < classes; ++k) {
    const auto &train_series = data.dataset.collections()[k].series();
    if (by_class[k].empty()) {
      continue;
    }
    if (by_class[k].size() != train_series.size()) {
      throw ValidationError("forecast: class " + std::to_string(k) + " has " +
                            std::to_string(by_class[k].size()) + " test series but " +
                            std::to_string(train_series.size()) +
                            " training series; they must pair up in file order");
    }
    const auto post = fit_class_posterior(p, data.dataset, static_cast<int>(k));
    double se_mc = 0.0;
    double se_last = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < by_class[k].size(); ++j) {
      const std::size_t i = by_class[k][j];
      const auto &r = records[i];
      const Eigen::VectorXd t = detail::normalized_times(r, p.time_scale, kMaxForecastTime, i);
      const Prediction pred = predict(post, p.eta[k], t);
      const TimeSeries &tr = train_series[j];
      const double last = vs.to_original(tr.values()[tr.size() - 1]);
      for (Eigen::Index a = 0; a < t.size(); ++a) {
        const double y = r.y[static_cast<std::size_t>(a)];
        const double mean = vs.to_original(pred.mean[a]);
        se_mc += (y - mean) * (y - mean);
        se_last += (y - last) * (y - last);
        ++n;
        points.push_back({{"class", k},
                          {"series", j},
                          {"t", r.t[static_cast<std::size_t>(a)]},
                          {"y", y},
                          {"motion_code", mean},
                          {"variance", pred.variance[a] * vs.scale * vs.scale},
                          {"last_seen", last}});
      }
    }
    class_rows.push_back({{"label", k},
                          {"original_label", data.class_labels[k]},
                          {"points", n},
                          {"rmse_motion_code", std::sqrt(se_mc / static_cast<double>(n))},
                          {"rmse_last_seen", std::sqrt(se_last / static_cast<double>(n))}});
  }
  log.info("forecast " + std::to_string(points.size()) + " test points");
  detail::write_json({{"command", "forecast"},
                      {"hyperparameters", hyper_json(p.hyper)},
                      {"wall_clock_seconds", detail::seconds_since(start)},
                      {"classes", class_rows},
                      {"points", points}},
                     f.out, out);
  return kExitOk;
}

/// Sorted most informative timestamps per class with the predicted mean and
/// variance there, in normalized and original time, values in original units.
inline int cmd_timestamps(const EvalFlags &f, std::ostream &out, const Logger &) {
  const auto start = std::chrono::steady_clock::now();
  const ModelFile model = load_model(f.model);
  const auto &p = model.params;
  const auto data = detail::load_training_for(model, f.data, f.format);
  const auto posts = fit_all_posteriors(p, data.dataset, f.threads);
  const auto &vs = p.value_scale;
  json rows = json::array();
  for (std::size_t k = 0; k < p.num_classes(); ++k) {
    Eigen::VectorXd s = informative_timestamps(p.theta, p.z[k]);
    std::sort(s.begin(), s.end());
    const Prediction pred = predict(posts[k], p.eta[k], s);
    Eigen::VectorXd original(s.size());
    Eigen::VectorXd mean(s.size());
    for (Eigen::Index a = 0; a < s.size(); ++a) {
      original[a] = p.time_scale.to_original(s[a]);
      mean[a] = vs.to_original(pred.mean[a]);
    }
    rows.push_back({{"label", k},
                    {"original_label", data.class_labels[k]},
                    {"timestamps", detail::to_json(s)},
                    {"timestamps_original", detail::to_json(original)},
                    {"mean", detail::to_json(mean)},
                    {"variance", detail::to_json(pred.variance * vs.scale * vs.scale)}});
  }
  detail::write_json({{"command", "timestamps"},
                      {"hyperparameters", hyper_json(p.hyper)},
                      {"wall_clock_seconds", detail::seconds_since(start)},
                      {"classes", rows}},
                     f.out, out);
  return kExitOk;
}

struct BenchFlags {
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  bool skip_complexity = false;
};

/// Runs the acceptance checks. report.json holds only deterministic content;
/// runtimes and the timing-based complexity check go to timings.json.
inline int cmd_bench(const BenchFlags &f, std::ostream &out, const Logger &log) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(f.out, ec);
  const fs::path report_path = fs::path(f.out) / "report.json";
  {
    std::ofstream probe(report_path);
    if (ec || !probe) {
      throw InputError("cannot write to output directory " + f.out);
    }
  }
  acceptance::Options opt;
  opt.seed = f.seed;
  opt.threads = f.threads;
  opt.complexity = !f.skip_complexity;
  const auto results = acceptance::run_all(opt);
  bool all = true;
  for (const auto &r : results) {
    out << acceptance::summary_line(r) << '\n';
    all = all && r.passed();
  }
  bool tolerance = true;
  for (const auto &r : results) {
    tolerance = tolerance && (r.timing_based || r.accurate);
  }
  detail::write_json({{"command", "bench"},
                      {"seed", f.seed},
                      {"hyperparameters", hyper_json(Hyperparams{})},
                      {"all_within_tolerance", tolerance},
                      {"checks", acceptance::deterministic_report(results)}},
                     report_path.string(), out);
  detail::write_json({{"command", "bench"},
                      {"wall_clock_seconds", detail::seconds_since(start)},
                      {"all_passed", all},
                      {"checks", acceptance::timing_report(results)}},
                     (fs::path(f.out) / "timings.json").string(), out);
  log.info("wrote " + report_path.string());
  return all ? kExitOk : kExitCheckFailed;
}

struct SplitFlags {
  std::string data;
  std::string format = "ragged";
  double fraction = 0.8;
  std::string out_train;
  std::string out_test;
};

/// Splits every series in time and writes two ragged files that share the
/// full data's time range in their header.
inline int cmd_split(const SplitFlags &f, std::ostream &out, const Logger &) {
  RaggedFile file;
  if (f.format == "ucr") {
    file.records = read_ucr(fs::path(f.data)).records;
  } else {
    file = read_ragged(fs::path(f.data));
  }
  const TimeScale ts = file.time_scale ? *file.time_scale : time_range(file.records);
  const RecordSplit split = split_records(file.records, f.fraction);
  write_ragged(fs::path(f.out_train), split.train, ts);
  write_ragged(fs::path(f.out_test), split.test, ts);
  out << "split " << file.records.size() << " series at fraction " << f.fraction << '\n';
  return kExitOk;
}

struct NoiseFlags {
  std::string data;
  std::string format = "ragged";
  double level = 0.3;
  std::uint64_t seed = 0;
  std::string scope = "global";
  std::string out;
};

/// Adds Gaussian noise with std level * max|y| and writes the same format.
inline int cmd_noise(const NoiseFlags &f, std::ostream &out, const Logger &) {
  const NoiseScope scope =
      f.scope == "per-series" ? NoiseScope::per_series : NoiseScope::global;
  if (f.format == "ucr") {
    UcrFile file = read_ucr(fs::path(f.data));
    file.records = inject_noise(std::move(file.records), f.level, f.seed, scope);
    detail::write_ucr(f.out, file.records, file.original_labels);
    out << "noise " << f.level << " on " << file.records.size() << " series\n";
    return kExitOk;
  }
  RaggedFile file = read_ragged(fs::path(f.data));
  file.records = inject_noise(std::move(file.records), f.level, f.seed, scope);
  write_ragged(fs::path(f.out), file.records, file.time_scale);
  out << "noise " << f.level << " on " << file.records.size() << " series\n";
  return kExitOk;
}

inline void add_hyper_flags(CLI::App *cmd, Hyperparams &h) {
  cmd->add_option("--m", h.m, "number of most informative timestamps")->capture_default_str();
  cmd->add_option("--d", h.d, "motion code dimension")->capture_default_str();
  cmd->add_option("--J", h.J, "spectral kernel components")->capture_default_str();
  cmd->add_option("--lambda", h.lambda, "motion code penalty")->capture_default_str();
  cmd->add_option("--sigma", h.sigma, "noise standard deviation (normalized units)")
      ->capture_default_str();
  cmd->add_option("--max-iters", h.max_iters, "L-BFGS iterations M")->capture_default_str();
  cmd->add_option("--epsilon", h.epsilon, "stop when one step lowers the loss by less")
      ->capture_default_str();
  cmd->add_option("--jitter", h.jitter, "base Cholesky jitter")->capture_default_str();
  cmd->add_option("--seed", h.seed, "seed recorded with the model")->capture_default_str();
}

inline int run_cli(const std::vector<std::string> &args, std::ostream &out,
                   std::ostream &err) {
  const Logger log(err, log_level_from_env());
  CLI::App app{"Motion Code: sparse Gaussian process classification and forecasting of "
               "time series collections",
               "motion-code"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"ragged", "ucr"};

  TrainFlags train_f;
  auto *train_cmd = app.add_subcommand("train", "train a model and write it to --out");
  train_cmd->add_option("--data", train_f.data, "training data file")->required();
  train_cmd->add_option("--format", train_f.format)->check(CLI::IsMember(formats));
  train_cmd->add_option("--out", train_f.out, "model file to write")->required();
  train_cmd->add_option("--report", train_f.report, "optional JSON report path");
  train_cmd->add_option("--threads", train_f.threads)->check(CLI::PositiveNumber);
  add_hyper_flags(train_cmd, train_f.hyper);

  EvalFlags eval_f;
  const auto add_eval = [&](const char *name, const char *help, bool needs_test) {
    auto *cmd = app.add_subcommand(name, help);
    cmd->add_option("--model", eval_f.model, "model file")->required();
    cmd->add_option("--data", eval_f.data, "training data the model was fitted on")
        ->required();
    if (needs_test) {
      cmd->add_option("--test", eval_f.test, "test data file")->required();
    }
    cmd->add_option("--format", eval_f.format)->check(CLI::IsMember(formats));
    cmd->add_option("--out", eval_f.out, "report path (default stdout)");
    cmd->add_option("--threads", eval_f.threads)->check(CLI::PositiveNumber);
    return cmd;
  };
  auto *classify_cmd = add_eval("classify", "classify test series, report accuracy", true);
  auto *forecast_cmd =
      add_eval("forecast", "forecast test points, report RMSE vs Last-Seen", true);
  auto *timestamps_cmd =
      add_eval("timestamps", "report the most informative timestamps per class", false);

  BenchFlags bench_f;
  auto *bench_cmd = app.add_subcommand("bench", "run the synthetic acceptance benchmarks");
  bench_cmd->add_option("--seed", bench_f.seed)->capture_default_str();
  bench_cmd->add_option("--out", bench_f.out, "output directory")->required();
  bench_cmd->add_option("--threads", bench_f.threads)->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--skip-complexity", bench_f.skip_complexity,
                      "skip the timing-based scaling check");

  SplitFlags split_f;
  auto *split_cmd = app.add_subcommand("split", "split every series in time");
  split_cmd->add_option("--data", split_f.data)->required();
  split_cmd->add_option("--format", split_f.format)->check(CLI::IsMember(formats));
  split_cmd->add_option("--fraction", split_f.fraction)->capture_default_str();
  split_cmd->add_option("--out-train", split_f.out_train)->required();
  split_cmd->add_option("--out-test", split_f.out_test)->required();

  NoiseFlags noise_f;
  auto *noise_cmd = app.add_subcommand("noise", "add Gaussian noise to a data file");
  noise_cmd->add_option("--data", noise_f.data)->required();
  noise_cmd->add_option("--format", noise_f.format)->check(CLI::IsMember(formats));
  noise_cmd->add_option("--level", noise_f.level)->capture_default_str();
  noise_cmd->add_option("--seed", noise_f.seed)->capture_default_str();
  noise_cmd->add_option("--scope", noise_f.scope)
      ->check(CLI::IsMember({"global", "per-series"}));
  noise_cmd->add_option("--out", noise_f.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_f, out, log);
    if (classify_cmd->parsed()) return cmd_classify(eval_f, out, log);
    if (forecast_cmd->parsed()) return cmd_forecast(eval_f, out, log);
    if (timestamps_cmd->parsed()) return cmd_timestamps(eval_f, out, log);
    if (bench_cmd->parsed()) return cmd_bench(bench_f, out, log);
    if (split_cmd->parsed()) return cmd_split(split_f, out, log);
    if (noise_cmd->parsed()) return cmd_noise(noise_f, out, log);
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

} // namespace motion_code::cli

#endif
