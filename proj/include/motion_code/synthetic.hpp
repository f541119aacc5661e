#ifndef MOTION_CODE_SYNTHETIC_HPP
#define MOTION_CODE_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "motion_code/core.hpp"
#include "motion_code/data_io.hpp"
#include "motion_code/optimizer.hpp"
#include "motion_code/rng.hpp"

namespace motion_code::synthetic {

/// n timestamps in (0, 1), one per equal-width stratum, each at least
/// 0.2 / n away from its stratum edges.
inline Eigen::VectorXd stratified_times(Rng &rng, Eigen::Index n) {
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t[i] = (static_cast<double>(i) + rng.uniform(0.2, 0.8)) / static_cast<double>(n);
  }
  return t;
}

inline KernelParams random_kernel(Rng &rng, Eigen::Index components,
                                  double log_amp_lo, double log_amp_hi,
                                  double log_bw_lo, double log_bw_hi) {
  Eigen::VectorXd a(components);
  Eigen::VectorXd b(components);
  for (Eigen::Index j = 0; j < components; ++j) {
    a[j] = rng.uniform(log_amp_lo, log_amp_hi);
    b[j] = rng.uniform(log_bw_lo, log_bw_hi);
  }
  return {a, b};
}

/// A smooth random signal plus Gaussian noise at stratified timestamps.
inline TimeSeries random_series(Rng &rng, Eigen::Index n, double noise = 0.1) {
  const Eigen::VectorXd t = stratified_times(rng, n);
  const double amp = rng.uniform(0.5, 1.5);
  const double freq = rng.uniform(0.5, 2.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double offset = rng.uniform(-0.5, 0.5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = offset + amp * std::sin(2.0 * std::numbers::pi * freq * t[i] + phase) +
           noise * rng.normal();
  }
  return {t, y};
}

inline Collection random_collection(Rng &rng, int label,
                                    const std::vector<Eigen::Index> &sizes,
                                    double noise = 0.1) {
  std::vector<TimeSeries> series;
  for (auto n : sizes) {
    series.push_back(random_series(rng, n, noise));
  }
  return {label, std::move(series)};
}

/// Uneven timestamps on [0, 1]: sorted uniform draws, strictly increasing.
inline std::vector<double> uneven_times(Rng &rng, int n) {
  std::vector<double> t;
  while (static_cast<int>(t.size()) < n) {
    t.clear();
    for (int i = 0; i < n; ++i) {
      t.push_back(rng.uniform());
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return t;
}

inline double sine_signal(double t) { return std::sin(2.0 * std::numbers::pi * t); }
inline double ramp_signal(double t) { return t; }

/// Noise-free records: class 0 is a unit-amplitude sine over one period,
/// class 1 a linear ramp from 0 to 1. Lengths are uniform in
/// [min_len, max_len].
inline std::vector<RaggedRecord> sine_ramp_records(Rng &rng, int per_class,
                                                   int min_len, int max_len) {
  std::vector<RaggedRecord> out;
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < per_class; ++i) {
      RaggedRecord r;
      r.label = label;
      r.t = uneven_times(rng, rng.uniform_int(min_len, max_len));
      for (double t : r.t) {
        r.y.push_back(label == 0 ? sine_signal(t) : ramp_signal(t));
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct BenchmarkSpec {
  int train_per_class = 10;
  int test_per_class = 20;
  int min_len = 40;
  int max_len = 60;
  double noise_level = 0.3;
};

struct BenchmarkData {
  std::vector<RaggedRecord> train;
  std::vector<RaggedRecord> test;
};

/// Train and test sets of the two-class sine/ramp problem with noise of
/// noise_level * max|y| added to each set. Timestamps live on [0, 1].
inline BenchmarkData sine_ramp_benchmark(std::uint64_t seed,
                                         const BenchmarkSpec &spec = {}) {
  Rng rng(seed);
  BenchmarkData data;
  data.train = sine_ramp_records(rng, spec.train_per_class, spec.min_len, spec.max_len);
  data.test = sine_ramp_records(rng, spec.test_per_class, spec.min_len, spec.max_len);
  data.train = inject_noise(std::move(data.train), spec.noise_level, seed * 2 + 1);
  data.test = inject_noise(std::move(data.test), spec.noise_level, seed * 2 + 2);
  return data;
}

/// A small random multi-class problem with random parameters, used by the
/// gradient checks. Rows of theta are spread in logit space so the inducing
/// timestamps of each class stay apart and K_SS stays well conditioned.
struct RandomProblem {
  std::vector<Collection> collections;
  ModelParams params;
};

inline RandomProblem random_problem(std::uint64_t seed, int classes, int J, int m,
                                    int d = 2) {
  Rng rng(seed);
  RandomProblem p;
  for (int k = 0; k < classes; ++k) {
    std::vector<Eigen::Index> sizes;
    const int batch = rng.uniform_int(1, 3);
    for (int i = 0; i < batch; ++i) {
      sizes.push_back(rng.uniform_int(4, 8));
    }
    p.collections.push_back(random_collection(rng, k, sizes));
  }
  Hyperparams h;
  h.m = m;
  h.d = d;
  h.J = J;
  h.lambda = rng.uniform(0.1, 1.0);
  h.sigma = rng.uniform(0.2, 0.5);
  p.params = init_params(static_cast<std::size_t>(classes), h);
  for (int k = 0; k < classes; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    p.params.eta[kk] = random_kernel(rng, J, -0.5, 0.5, 1.0, 3.0);
    for (int c = 0; c < d; ++c) {
      p.params.z[kk][c] = rng.uniform(0.6, 1.4) / d;
    }
  }
  for (int r = 0; r < m; ++r) {
    const double centre =
        m == 1 ? 0.0 : -2.5 + 5.0 * static_cast<double>(r) / (m - 1);
    for (int c = 0; c < d; ++c) {
      p.params.theta(r, c) = centre + rng.uniform(-0.3, 0.3);
    }
  }
  return p;
}

/// Fixed normalization for benchmark fixtures: time on [0, 1] as generated.
inline constexpr TimeScale kUnitTime{0.0, 1.0};

} // namespace motion_code::synthetic

#endif
