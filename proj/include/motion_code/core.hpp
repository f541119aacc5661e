#ifndef MOTION_CODE_CORE_HPP
#define MOTION_CODE_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "motion_code/error.hpp"
#include "motion_code/kernel.hpp"

namespace motion_code {

/// Original-unit time range mapped onto [0, 1].
struct TimeScale {
  double t_min = 0.0;
  double t_max = 1.0;

  double span() const { return t_max - t_min; }
  double to_original(double normalized) const {
    return t_min + normalized * span();
  }
  bool operator==(const TimeScale &) const = default;
};

/// Affine value map: normalized = (original - center) / scale.
struct ValueScale {
  double center = 0.0;
  double scale = 1.0;

  double normalize(double v) const { return (v - center) / scale; }
  double to_original(double v) const { return v * scale + center; }
  bool operator==(const ValueScale &) const = default;
};

inline std::vector<double> normalize_timestamps(const std::vector<double> &raw,
                                                const TimeScale &scale) {
  if (!(scale.t_min < scale.t_max)) {
    throw RangeError("normalize_timestamps: time scale needs t_min < t_max");
  }
  std::vector<double> out;
  out.reserve(raw.size());
  for (double t : raw) {
    if (!(t >= scale.t_min && t <= scale.t_max)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "normalize_timestamps: time " << t << " outside [" << scale.t_min
          << ", " << scale.t_max << "]";
      throw RangeError(msg.str());
    }
    out.push_back((t - scale.t_min) / scale.span());
  }
  return out;
}

/// One realization: strictly increasing normalized timestamps in [0, 1] and
/// the observed values at those timestamps.
class TimeSeries {
public:
  TimeSeries(Eigen::VectorXd timestamps, Eigen::VectorXd values)
      : t_(std::move(timestamps)), y_(std::move(values)) {
    validate();
  }

  TimeSeries(const std::vector<double> &timestamps,
             const std::vector<double> &values)
      : TimeSeries(Eigen::Map<const Eigen::VectorXd>(
                       timestamps.data(),
                       static_cast<Eigen::Index>(timestamps.size())),
                   Eigen::Map<const Eigen::VectorXd>(
                       values.data(), static_cast<Eigen::Index>(values.size()))) {}

  const Eigen::VectorXd &timestamps() const { return t_; }
  const Eigen::VectorXd &values() const { return y_; }
  Eigen::Index size() const { return t_.size(); }

private:
  void validate() const {
    if (t_.size() != y_.size()) {
      throw ValidationError("time series: timestamps and values differ in length");
    }
    if (t_.size() < 2) {
      throw ValidationError("time series: at least 2 points required");
    }
    if (!y_.allFinite()) {
      throw ValidationError("time series: non-finite value");
    }
    for (Eigen::Index i = 0; i < t_.size(); ++i) {
      if (!(t_[i] >= 0.0 && t_[i] <= 1.0)) {
        throw ValidationError("time series: timestamp outside [0, 1]");
      }
      if (i > 0 && !(t_[i] > t_[i - 1])) {
        throw ValidationError("time series: timestamps not strictly increasing");
      }
    }
  }

  Eigen::VectorXd t_;
  Eigen::VectorXd y_;
};

/// The sample set of one class.
class Collection {
public:
  Collection(int label, std::vector<TimeSeries> series)
      : label_(label), series_(std::move(series)) {
    if (label_ < 0) {
      throw ValidationError("collection: label must be non-negative");
    }
    if (series_.empty()) {
      throw ValidationError("collection: no series");
    }
  }

  int label() const { return label_; }
  const std::vector<TimeSeries> &series() const { return series_; }
  std::size_t size() const { return series_.size(); }

  Eigen::Index total_points() const {
    Eigen::Index n = 0;
    for (const auto &s : series_) {
      n += s.size();
    }
    return n;
  }

private:
  int label_;
  std::vector<TimeSeries> series_;
};

class Dataset {
public:
  Dataset(std::vector<Collection> collections, TimeScale time_scale,
          ValueScale value_scale = {})
      : collections_(std::move(collections)), time_scale_(time_scale),
        value_scale_(value_scale) {
    std::sort(collections_.begin(), collections_.end(),
              [](const Collection &a, const Collection &b) {
                return a.label() < b.label();
              });
    if (collections_.size() < 2) {
      throw DatasetError("dataset: at least 2 labels required");
    }
    for (std::size_t k = 0; k < collections_.size(); ++k) {
      if (k > 0 && collections_[k].label() == collections_[k - 1].label()) {
        throw DatasetError("dataset: duplicate label " +
                           std::to_string(collections_[k].label()));
      }
      if (collections_[k].label() != static_cast<int>(k)) {
        throw DatasetError("dataset: labels must be contiguous from 0");
      }
    }
    if (!(time_scale_.t_min < time_scale_.t_max)) {
      throw DatasetError("dataset: time scale needs t_min < t_max");
    }
    if (!(value_scale_.scale > 0.0) || !std::isfinite(value_scale_.center)) {
      throw DatasetError("dataset: value scale must be positive and finite");
    }
  }

  const std::vector<Collection> &collections() const { return collections_; }
  const Collection &collection(int label) const {
    if (label < 0 || label >= static_cast<int>(collections_.size())) {
      throw LookupError("dataset: unknown class id " + std::to_string(label));
    }
    return collections_[static_cast<std::size_t>(label)];
  }
  std::size_t num_classes() const { return collections_.size(); }
  const TimeScale &time_scale() const { return time_scale_; }
  const ValueScale &value_scale() const { return value_scale_; }

  Eigen::Index total_points() const {
    Eigen::Index n = 0;
    for (const auto &c : collections_) {
      n += c.total_points();
    }
    return n;
  }

private:
  std::vector<Collection> collections_;
  TimeScale time_scale_;
  ValueScale value_scale_;
};

struct Hyperparams {
  int m = 10;
  int d = 2;
  int J = 1;
  double lambda = 1.0;
  double sigma = 0.1;
  int max_iters = 10;
  double epsilon = 1e-5;
  double jitter = kDefaultJitter;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1 || d < 1 || J < 1) {
      throw ValidationError("hyperparameters: m, d and J must be >= 1");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ValidationError("hyperparameters: lambda must be >= 0");
    }
    if (!(sigma > 0.0) || !(jitter > 0.0) || !(epsilon > 0.0) ||
        !std::isfinite(sigma) || !std::isfinite(jitter)) {
      throw ValidationError(
          "hyperparameters: sigma, jitter and epsilon must be > 0");
    }
    if (max_iters < 0) {
      throw ValidationError("hyperparameters: max_iters must be >= 0");
    }
  }

  bool operator==(const Hyperparams &) const = default;
};

/// Trained model: per-class kernel parameters (eta), motion codes (z) and the
/// shared m x d map (theta), plus the normalization used at training time.
struct ModelParams {
  std::vector<KernelParams> eta;
  std::vector<Eigen::VectorXd> z;
  Eigen::MatrixXd theta;
  Hyperparams hyper;
  TimeScale time_scale;
  ValueScale value_scale;

  std::size_t num_classes() const { return eta.size(); }

  void validate() const {
    hyper.validate();
    if (eta.empty() || eta.size() != z.size()) {
      throw ValidationError("model: eta and z must have one entry per class");
    }
    if (theta.rows() != hyper.m || theta.cols() != hyper.d) {
      throw ValidationError("model: theta must be m x d");
    }
    if (!theta.allFinite()) {
      throw ValidationError("model: theta has non-finite entries");
    }
    for (std::size_t k = 0; k < eta.size(); ++k) {
      eta[k].validate();
      if (eta[k].components() != hyper.J) {
        throw ValidationError("model: eta has wrong number of components");
      }
      if (z[k].size() != hyper.d || !z[k].allFinite()) {
        throw ValidationError("model: motion code has wrong size or "
                              "non-finite entries");
      }
    }
  }
};

/// Predictive moments of one class's latent signal at query timestamps.
struct Prediction {
  Eigen::VectorXd timestamps;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

} // namespace motion_code

#endif
