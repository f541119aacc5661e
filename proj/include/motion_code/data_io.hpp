#ifndef MOTION_CODE_DATA_IO_HPP
#define MOTION_CODE_DATA_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "motion_code/core.hpp"
#include "motion_code/error.hpp"
#include "motion_code/rng.hpp"

namespace motion_code {

using json = nlohmann::json;

/// One series in original units, as stored on disk.
struct RaggedRecord {
  int label = 0;
  std::vector<double> t;
  std::vector<double> y;

  bool operator==(const RaggedRecord &) const = default;
};

/// Records plus the optional time range carried by a header line.
struct RaggedFile {
  std::optional<TimeScale> time_scale;
  std::vector<RaggedRecord> records;
};

namespace detail {

inline std::string at_line(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

inline void validate_record(const RaggedRecord &r, std::size_t line) {
  if (r.t.size() != r.y.size()) {
    throw ValidationError(at_line(line) + "t and y differ in length");
  }
  if (r.t.size() < 2) {
    throw ValidationError(at_line(line) + "a series needs at least 2 points");
  }
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (!std::isfinite(r.t[i]) || !std::isfinite(r.y[i])) {
      throw ValidationError(at_line(line) + "non-finite number");
    }
    if (i > 0 && !(r.t[i] > r.t[i - 1])) {
      throw ValidationError(at_line(line) + "timestamps not strictly increasing");
    }
  }
}

inline std::vector<double> number_array(const json &j, const char *field,
                                        std::size_t line) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw ParseError(at_line(line) + "missing array field '" + field + "'");
  }
  std::vector<double> out;
  out.reserve(j.at(field).size());
  for (const auto &v : j.at(field)) {
    if (!v.is_number()) {
      throw ParseError(at_line(line) + "non-numeric entry in '" + field + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

/// Rethrows the in-flight input error with `prefix` prepended, keeping its type.
[[noreturn]] inline void rethrow_located(const std::string &prefix) {
  try {
    throw;
  } catch (const ParseError &e) {
    throw ParseError(prefix + e.what());
  } catch (const ValidationError &e) {
    throw ValidationError(prefix + e.what());
  } catch (const FormatError &e) {
    throw FormatError(prefix + e.what());
  } catch (const RangeError &e) {
    throw RangeError(prefix + e.what());
  } catch (const DatasetError &e) {
    throw DatasetError(prefix + e.what());
  } catch (const InputError &e) {
    throw InputError(prefix + e.what());
  }
}

inline std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return in;
}

} // namespace detail

// Ragged format: UTF-8 JSON Lines. Each non-blank line is one record
//   {"label": 0, "t": [0.0, 0.4, 1.3], "y": [1.0, 2.5, -0.5]}
// An optional first line {"time_scale": [t_min, t_max]} fixes the time range
// used for normalization instead of the range of the file's own timestamps.

inline RaggedFile read_ragged(std::istream &in) {
  RaggedFile file;
  std::string text;
  std::size_t line = 0;
  bool seen_record = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ParseError(detail::at_line(line) + "malformed record (" + e.what() + ")");
    }
    if (!j.is_object()) {
      throw ParseError(detail::at_line(line) + "record must be a JSON object");
    }
    if (j.contains("time_scale")) {
      if (seen_record || file.time_scale) {
        throw ParseError(detail::at_line(line) +
                         "time_scale header must be the first line");
      }
      const auto ts = detail::number_array(j, "time_scale", line);
      if (ts.size() != 2 || !(ts[0] < ts[1])) {
        throw ParseError(detail::at_line(line) +
                         "time_scale must be [t_min, t_max] with t_min < t_max");
      }
      file.time_scale = TimeScale{ts[0], ts[1]};
      continue;
    }
    if (!j.contains("label") || !j.at("label").is_number_integer()) {
      throw ParseError(detail::at_line(line) + "missing integer field 'label'");
    }
    RaggedRecord r;
    r.label = j.at("label").get<int>();
    r.t = detail::number_array(j, "t", line);
    r.y = detail::number_array(j, "y", line);
    detail::validate_record(r, line);
    file.records.push_back(std::move(r));
    seen_record = true;
  }
  return file;
}

inline RaggedFile read_ragged(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  try {
    return read_ragged(in);
  } catch (const InputError &) {
    detail::rethrow_located(path.string() + ": ");
  }
}

inline void write_ragged(std::ostream &out, const std::vector<RaggedRecord> &records,
                         const std::optional<TimeScale> &time_scale = std::nullopt) {
  if (time_scale) {
    out << json{{"time_scale", {time_scale->t_min, time_scale->t_max}}}.dump()
        << '\n';
  }
  for (const auto &r : records) {
    json j;
    j["label"] = r.label;
    j["t"] = r.t;
    j["y"] = r.y;
    out << j.dump() << '\n';
  }
}

inline void write_ragged(const std::filesystem::path &path,
                         const std::vector<RaggedRecord> &records,
                         const std::optional<TimeScale> &time_scale = std::nullopt) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  write_ragged(out, records, time_scale);
  if (!out) {
    throw InputError("failed writing " + path.string());
  }
}

/// Normalization to apply when building a Dataset. Missing fields are
/// computed from the records: the time range from min/max timestamps, the
/// value map from the global mean and standard deviation.
struct Normalization {
  std::optional<TimeScale> time_scale;
  std::optional<ValueScale> value_scale;
};

inline TimeScale time_range(const std::vector<RaggedRecord> &records) {
  if (records.empty()) {
    throw DatasetError("dataset: no records");
  }
  TimeScale ts{records.front().t.front(), records.front().t.back()};
  for (const auto &r : records) {
    ts.t_min = std::min(ts.t_min, r.t.front());
    ts.t_max = std::max(ts.t_max, r.t.back());
  }
  if (!(ts.t_min < ts.t_max)) {
    throw DatasetError("dataset: all timestamps are equal");
  }
  return ts;
}

inline ValueScale value_moments(const std::vector<RaggedRecord> &records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto &r : records) {
    for (double v : r.y) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) {
    throw DatasetError("dataset: no values");
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto &r : records) {
    for (double v : r.y) {
      ss += (v - mean) * (v - mean);
    }
  }
  const double sd = std::sqrt(ss / static_cast<double>(n));
  return {mean, sd > 0.0 ? sd : 1.0};
}

inline Dataset make_dataset(const std::vector<RaggedRecord> &records,
                            const Normalization &norm = {}) {
  const TimeScale ts = norm.time_scale ? *norm.time_scale : time_range(records);
  const ValueScale vs = norm.value_scale ? *norm.value_scale : value_moments(records);
  std::map<int, std::vector<TimeSeries>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    std::vector<double> t;
    try {
      t = normalize_timestamps(r.t, ts);
    } catch (const RangeError &e) {
      throw RangeError("record " + std::to_string(i + 1) + ": " + e.what());
    }
    std::vector<double> y(r.y.size());
    std::transform(r.y.begin(), r.y.end(), y.begin(),
                   [&](double v) { return vs.normalize(v); });
    groups[r.label].emplace_back(t, y);
  }
  std::vector<Collection> collections;
  for (auto &[label, series] : groups) {
    collections.emplace_back(label, std::move(series));
  }
  return Dataset(std::move(collections), ts, vs);
}

inline Dataset load_ragged(const std::filesystem::path &path,
                           Normalization norm = {}) {
  RaggedFile file = read_ragged(path);
  if (!norm.time_scale) {
    norm.time_scale = file.time_scale;
  }
  try {
    return make_dataset(file.records, norm);
  } catch (const InputError &) {
    detail::rethrow_located(path.string() + ": ");
  }
}

/// Rows of "label, v_0, ..., v_{N-1}" separated by tabs, commas or blanks.
struct UcrFile {
  std::vector<double> original_labels; // ascending; index = remapped label
  std::vector<RaggedRecord> records;
};

inline UcrFile read_ucr(std::istream &in,
                        const std::vector<double> &label_order = {}) {
  std::vector<std::pair<double, std::vector<double>>> rows;
  std::string text;
  std::size_t line = 0;
  std::size_t width = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::replace(text.begin(), text.end(), ',', ' ');
    std::replace(text.begin(), text.end(), '\t', ' ');
    std::istringstream fields(text);
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) {
          throw std::invalid_argument(tok);
        }
        values.push_back(v);
      } catch (const std::exception &) {
        throw ParseError(detail::at_line(line) + "bad number '" + tok + "'");
      }
    }
    if (values.size() < 3) {
      throw FormatError(detail::at_line(line) +
                        "need a label and at least 2 values");
    }
    if (width == 0) {
      width = values.size();
    } else if (values.size() != width) {
      throw FormatError(detail::at_line(line) + "row has " +
                        std::to_string(values.size() - 1) + " values, expected " +
                        std::to_string(width - 1) +
                        " (use the ragged format for uneven lengths)");
    }
    if (values[0] != std::round(values[0])) {
      throw ParseError(detail::at_line(line) + "label is not an integer");
    }
    rows.emplace_back(values[0], std::vector<double>(values.begin() + 1, values.end()));
  }

  UcrFile file;
  if (label_order.empty()) {
    for (const auto &row : rows) {
      file.original_labels.push_back(row.first);
    }
    std::sort(file.original_labels.begin(), file.original_labels.end());
    file.original_labels.erase(
        std::unique(file.original_labels.begin(), file.original_labels.end()),
        file.original_labels.end());
  } else {
    file.original_labels = label_order;
  }
  for (const auto &[label, values] : rows) {
    const auto it = std::find(file.original_labels.begin(),
                              file.original_labels.end(), label);
    if (it == file.original_labels.end()) {
      throw DatasetError("label " + std::to_string(label) +
                         " does not occur in the training labels");
    }
    RaggedRecord r;
    r.label = static_cast<int>(it - file.original_labels.begin());
    const std::size_t n = values.size();
    r.t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      r.t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }
    r.y = values;
    file.records.push_back(std::move(r));
  }
  return file;
}

inline UcrFile read_ucr(const std::filesystem::path &path,
                        const std::vector<double> &label_order = {}) {
  auto in = detail::open_input(path);
  try {
    return read_ucr(in, label_order);
  } catch (const InputError &) {
    detail::rethrow_located(path.string() + ": ");
  }
}

inline Dataset load_ucr_style(const std::filesystem::path &path,
                              const Normalization &norm = {},
                              const std::vector<double> &label_order = {}) {
  const UcrFile file = read_ucr(path, label_order);
  try {
    return make_dataset(file.records, norm);
  } catch (const InputError &) {
    detail::rethrow_located(path.string() + ": ");
  }
}

/// Dataset back to original units.
inline std::vector<RaggedRecord> to_records(const Dataset &dataset) {
  std::vector<RaggedRecord> out;
  const auto &ts = dataset.time_scale();
  const auto &vs = dataset.value_scale();
  for (const auto &c : dataset.collections()) {
    for (const auto &s : c.series()) {
      RaggedRecord r;
      r.label = c.label();
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        r.t.push_back(ts.to_original(s.timestamps()[i]));
        r.y.push_back(vs.to_original(s.values()[i]));
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

enum class NoiseScope { global, per_series };

/// Adds N(0, (level * max|y|)^2) noise to every value, where the maximum is
/// taken over the whole input (or over each series with per_series).
inline std::vector<RaggedRecord> inject_noise(std::vector<RaggedRecord> records,
                                              double level, std::uint64_t seed,
                                              NoiseScope scope = NoiseScope::global) {
  if (!(level >= 0.0)) {
    throw ValidationError("inject_noise: level must be >= 0");
  }
  if (level == 0.0) {
    return records;
  }
  double global_max = 0.0;
  for (const auto &r : records) {
    for (double v : r.y) {
      global_max = std::max(global_max, std::abs(v));
    }
  }
  Rng rng(seed);
  for (auto &r : records) {
    double peak = global_max;
    if (scope == NoiseScope::per_series) {
      peak = 0.0;
      for (double v : r.y) {
        peak = std::max(peak, std::abs(v));
      }
    }
    const double sd = level * peak;
    for (double &v : r.y) {
      v += sd * rng.normal();
    }
  }
  return records;
}

/// Noise in original units on a normalized Dataset; the Dataset's value and
/// time maps are kept.
inline Dataset inject_noise(const Dataset &dataset, double level,
                            std::uint64_t seed,
                            NoiseScope scope = NoiseScope::global) {
  if (!(level >= 0.0)) {
    throw ValidationError("inject_noise: level must be >= 0");
  }
  if (level == 0.0) {
    return dataset;
  }
  const auto noisy = inject_noise(to_records(dataset), level, seed, scope);
  return make_dataset(noisy, {dataset.time_scale(), dataset.value_scale()});
}

/// Number of leading points kept for training: ceil(fraction * n).
inline std::size_t split_point(std::size_t n, double fraction) {
  return static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

struct RecordSplit {
  std::vector<RaggedRecord> train;
  std::vector<RaggedRecord> test;
};

/// Splits every record in time: the first ceil(fraction * N) points train,
/// the remaining (future) points test. Both sides need at least 2 points.
inline RecordSplit split_records(const std::vector<RaggedRecord> &records,
                                 double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("forecast_split: fraction must be in (0, 1)");
  }
  RecordSplit out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    const std::size_t cut = split_point(r.t.size(), fraction);
    if (cut < 2 || r.t.size() - cut < 2) {
      throw SplitError("forecast_split: record " + std::to_string(i + 1) +
                       " with " + std::to_string(r.t.size()) +
                       " points leaves fewer than 2 points on one side");
    }
    RaggedRecord a{r.label, {r.t.begin(), r.t.begin() + static_cast<long>(cut)},
                   {r.y.begin(), r.y.begin() + static_cast<long>(cut)}};
    RaggedRecord b{r.label, {r.t.begin() + static_cast<long>(cut), r.t.end()},
                   {r.y.begin() + static_cast<long>(cut), r.y.end()}};
    out.train.push_back(std::move(a));
    out.test.push_back(std::move(b));
  }
  return out;
}

/// Time split of a normalized Dataset. Both halves keep the full data's time
/// and value maps, so test timestamps lie beyond the training region.
inline std::pair<Dataset, Dataset> forecast_split(const Dataset &dataset,
                                                  double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("forecast_split: fraction must be in (0, 1)");
  }
  std::vector<Collection> train;
  std::vector<Collection> test;
  for (const auto &c : dataset.collections()) {
    std::vector<TimeSeries> tr;
    std::vector<TimeSeries> te;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto &s = c.series()[i];
      const auto n = static_cast<std::size_t>(s.size());
      const auto cut = static_cast<Eigen::Index>(split_point(n, fraction));
      if (cut < 2 || s.size() - cut < 2) {
        throw SplitError("forecast_split: series " + std::to_string(i) +
                         " of class " + std::to_string(c.label()) + " with " +
                         std::to_string(n) +
                         " points leaves fewer than 2 points on one side");
      }
      tr.emplace_back(Eigen::VectorXd(s.timestamps().head(cut)),
                      Eigen::VectorXd(s.values().head(cut)));
      te.emplace_back(Eigen::VectorXd(s.timestamps().tail(s.size() - cut)),
                      Eigen::VectorXd(s.values().tail(s.size() - cut)));
    }
    train.emplace_back(c.label(), std::move(tr));
    test.emplace_back(c.label(), std::move(te));
  }
  return {Dataset(std::move(train), dataset.time_scale(), dataset.value_scale()),
          Dataset(std::move(test), dataset.time_scale(), dataset.value_scale())};
}

/// FNV-1a over the bit patterns of every normalized timestamp and value.
inline std::string dataset_digest(const Dataset &dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  const auto mix_double = [&](double d) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    mix(bits);
  };
  for (const auto &c : dataset.collections()) {
    mix(static_cast<std::uint64_t>(c.label()));
    for (const auto &s : c.series()) {
      mix(static_cast<std::uint64_t>(s.size()));
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        mix_double(s.timestamps()[i]);
        mix_double(s.values()[i]);
      }
    }
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

// Model file: a JSON document with format_version 1. Doubles are written in
// shortest round-trip form, so load(save(p)) reproduces p bit for bit.

constexpr int kModelFormatVersion = 1;

struct ModelFile {
  int format_version = kModelFormatVersion;
  ModelParams params;
  std::vector<double> class_labels; // original label per class, optional
  std::optional<std::string> training_digest;
};

namespace detail {

inline const json &field(const json &j, const std::string &key,
                         const std::string &path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("model file: missing field " + path + "." + key);
  }
  return j.at(key);
}

inline double number(const json &j, const std::string &path) {
  if (!j.is_number()) {
    throw ParseError("model file: field " + path + " is not a number");
  }
  return j.get<double>();
}

inline int integer(const json &j, const std::string &path) {
  if (!j.is_number_integer()) {
    throw ParseError("model file: field " + path + " is not an integer");
  }
  return j.get<int>();
}

inline Eigen::VectorXd vector(const json &j, const std::string &path) {
  if (!j.is_array()) {
    throw ParseError("model file: field " + path + " is not an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline json to_json(const Eigen::VectorXd &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

} // namespace detail

inline json model_to_json(const ModelFile &file) {
  const ModelParams &p = file.params;
  json j;
  j["format_version"] = file.format_version;
  const auto &h = p.hyper;
  j["hyper"] = {{"m", h.m},           {"d", h.d},
                {"J", h.J},           {"lambda", h.lambda},
                {"sigma", h.sigma},   {"max_iters", h.max_iters},
                {"epsilon", h.epsilon}, {"jitter", h.jitter},
                {"seed", h.seed}};
  j["time_scale"] = {p.time_scale.t_min, p.time_scale.t_max};
  j["value_scale"] = {{"center", p.value_scale.center},
                      {"scale", p.value_scale.scale}};
  j["eta"] = json::array();
  for (const auto &e : p.eta) {
    j["eta"].push_back({{"log_amplitudes", detail::to_json(e.log_amplitudes)},
                        {"log_bandwidths", detail::to_json(e.log_bandwidths)}});
  }
  j["z"] = json::array();
  for (const auto &z : p.z) {
    j["z"].push_back(detail::to_json(z));
  }
  j["theta"] = json::array();
  for (Eigen::Index r = 0; r < p.theta.rows(); ++r) {
    j["theta"].push_back(detail::to_json(p.theta.row(r).transpose()));
  }
  if (!file.class_labels.empty()) {
    j["class_labels"] = file.class_labels;
  }
  if (file.training_digest) {
    j["training_digest"] = *file.training_digest;
  }
  return j;
}

inline ModelFile model_from_json(const json &j) {
  using detail::field;
  ModelFile file;
  file.format_version = detail::integer(field(j, "format_version", "$"),
                                        "$.format_version");
  if (file.format_version != kModelFormatVersion) {
    throw VersionError("model file: unsupported format_version " +
                       std::to_string(file.format_version) + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  }
  ModelParams &p = file.params;
  const json &h = field(j, "hyper", "$");
  p.hyper.m = detail::integer(field(h, "m", "$.hyper"), "$.hyper.m");
  p.hyper.d = detail::integer(field(h, "d", "$.hyper"), "$.hyper.d");
  p.hyper.J = detail::integer(field(h, "J", "$.hyper"), "$.hyper.J");
  p.hyper.lambda = detail::number(field(h, "lambda", "$.hyper"), "$.hyper.lambda");
  p.hyper.sigma = detail::number(field(h, "sigma", "$.hyper"), "$.hyper.sigma");
  p.hyper.max_iters =
      detail::integer(field(h, "max_iters", "$.hyper"), "$.hyper.max_iters");
  p.hyper.epsilon =
      detail::number(field(h, "epsilon", "$.hyper"), "$.hyper.epsilon");
  p.hyper.jitter = detail::number(field(h, "jitter", "$.hyper"), "$.hyper.jitter");
  const json &seed = field(h, "seed", "$.hyper");
  if (!seed.is_number_unsigned()) {
    throw ParseError("model file: field $.hyper.seed is not an unsigned integer");
  }
  p.hyper.seed = seed.get<std::uint64_t>();

  const Eigen::VectorXd ts = detail::vector(field(j, "time_scale", "$"), "$.time_scale");
  if (ts.size() != 2) {
    throw ParseError("model file: field $.time_scale must have 2 entries");
  }
  p.time_scale = {ts[0], ts[1]};
  const json &vs = field(j, "value_scale", "$");
  p.value_scale.center =
      detail::number(field(vs, "center", "$.value_scale"), "$.value_scale.center");
  p.value_scale.scale =
      detail::number(field(vs, "scale", "$.value_scale"), "$.value_scale.scale");

  const json &eta = field(j, "eta", "$");
  if (!eta.is_array()) {
    throw ParseError("model file: field $.eta is not an array");
  }
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const std::string path = "$.eta[" + std::to_string(k) + "]";
    KernelParams kp;
    kp.log_amplitudes =
        detail::vector(field(eta[k], "log_amplitudes", path), path + ".log_amplitudes");
    kp.log_bandwidths =
        detail::vector(field(eta[k], "log_bandwidths", path), path + ".log_bandwidths");
    p.eta.push_back(std::move(kp));
  }
  const json &z = field(j, "z", "$");
  if (!z.is_array()) {
    throw ParseError("model file: field $.z is not an array");
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    p.z.push_back(detail::vector(z[k], "$.z[" + std::to_string(k) + "]"));
  }
  const json &theta = field(j, "theta", "$");
  if (!theta.is_array()) {
    throw ParseError("model file: field $.theta is not an array");
  }
  p.theta.resize(static_cast<Eigen::Index>(theta.size()), p.hyper.d);
  for (std::size_t r = 0; r < theta.size(); ++r) {
    const std::string path = "$.theta[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = detail::vector(theta[r], path);
    if (row.size() != p.hyper.d) {
      throw ParseError("model file: field " + path + " must have d entries");
    }
    p.theta.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  if (j.contains("class_labels")) {
    const Eigen::VectorXd labels = detail::vector(j.at("class_labels"), "$.class_labels");
    file.class_labels.assign(labels.data(), labels.data() + labels.size());
  }
  if (j.contains("training_digest")) {
    if (!j.at("training_digest").is_string()) {
      throw ParseError("model file: field $.training_digest is not a string");
    }
    file.training_digest = j.at("training_digest").get<std::string>();
  }
  try {
    p.validate();
  } catch (const ValidationError &e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  return file;
}

inline void save_model(const std::filesystem::path &path, const ModelFile &file) {
  file.params.validate();
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write model file " + path.string());
  }
  out << model_to_json(file).dump(2) << '\n';
  if (!out) {
    throw InputError("failed writing model file " + path.string());
  }
}

inline ModelFile load_model(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ParseError(path.string() + ": malformed model file (" + e.what() + ")");
  }
  return model_from_json(j);
}

} // namespace motion_code

#endif
