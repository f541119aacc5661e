#ifndef MOTION_CODE_ACCEPTANCE_HPP
#define MOTION_CODE_ACCEPTANCE_HPP

// End-to-end acceptance checks shared by the `bench` command and the
// acceptance test binary. Each check reports a deterministic part (metrics
// and the tolerance verdict) separately from its wall-clock part, so a bench
// report can be compared byte for byte across runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "motion_code/dense_reference.hpp"
#include "motion_code/motion_code.hpp"

namespace motion_code::acceptance {

using json = nlohmann::json;

struct CheckResult {
  std::string name;
  std::string description;
  bool accurate = false;     // tolerance part of the criterion
  bool timing_based = false; // verdict itself depends on wall-clock time
  double seconds = 0.0;
  double time_limit = 0.0;   // 0 means no runtime bound
  json metrics = json::object();
  json timing_metrics = json::object();

  bool within_time() const { return time_limit <= 0.0 || seconds < time_limit; }
  bool passed() const { return accurate && within_time(); }
};

struct Options {
  std::uint64_t seed = 0;
  int threads = 1;
  bool complexity = true;
};

namespace detail {

inline double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F> CheckResult timed(CheckResult r, F &&body) {
  const auto start = std::chrono::steady_clock::now();
  body(r);
  r.seconds = elapsed(start);
  return r;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  return seed * 1000003ULL + salt;
}

} // namespace detail

/// B = 1 and S = T: the bound equals the exact GP log marginal likelihood.
/// Run with jitter 1e-12, since a jitter j leaves a Nystrom trace near n j.
inline CheckResult bound_collapse(const Options &opt) {
  CheckResult r{"bound_collapse",
                "20 instances, B = 1, |T| <= 10, S = T: |bound - exact| <= 1e-8, trace <= 1e-8"};
  r.time_limit = 1.0;
  return detail::timed(r, [&](CheckResult &res) {
    Rng rng(detail::mix(opt.seed, 1));
    double worst_gap = 0.0;
    double worst_trace = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const auto n = static_cast<Eigen::Index>(rng.uniform_int(2, 10));
      const TimeSeries s = synthetic::random_series(rng, n);
      const KernelParams kp = synthetic::random_kernel(rng, 1, -0.5, 0.5, 5.0, 6.0);
      const double sigma = rng.uniform(0.2, 1.0);
      const auto ws = build_bound_workspace(Collection(0, {s}), kp, s.timestamps(), sigma, 1e-12);
      worst_gap = std::max(worst_gap,
                           std::abs(ws.bound - reference::exact_log_marginal(s, kp, sigma)));
      worst_trace = std::max(worst_trace, ws.trace);
    }
    res.accurate = worst_gap <= 1e-8 && worst_trace <= 1e-8;
    res.metrics = {{"max_abs_gap", worst_gap}, {"max_trace", worst_trace}};
  });
}

inline CheckResult woodbury_vs_dense(const Options &opt) {
  CheckResult r{"woodbury_vs_dense",
                "50 instances, L = 1, B <= 3, |T_i| <= 8, m <= 4: block bound vs dense within 1e-8"};
  r.time_limit = 2.0;
  return detail::timed(r, [&](CheckResult &res) {
    Rng rng(detail::mix(opt.seed, 2));
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<Eigen::Index> sizes(static_cast<std::size_t>(rng.uniform_int(1, 3)));
      for (auto &n : sizes) {
        n = rng.uniform_int(2, 8);
      }
      const Collection c = synthetic::random_collection(rng, 0, sizes);
      const KernelParams kp = synthetic::random_kernel(rng, rng.uniform_int(1, 2), -0.5, 0.5,
                                                       1.0, 3.0);
      const Eigen::VectorXd s = synthetic::stratified_times(rng, rng.uniform_int(1, 4));
      const double sigma = rng.uniform(0.1, 0.6);
      const auto ws = build_bound_workspace(c, kp, s, sigma, kDefaultJitter);
      const auto dense = reference::lmax_bound(c, kp, s, sigma, ws.k_ss.jitter_used);
      worst = std::max(worst, std::abs(ws.bound - dense.bound));
    }
    res.accurate = worst <= 1e-8;
    res.metrics = {{"max_abs_gap", worst}};
  });
}

inline CheckResult posterior_oracle(const Options &opt) {
  CheckResult r{"posterior_oracle",
                "50 instances: mu, A, predictive mean and variance vs dense formulas within 1e-8"};
  r.time_limit = 2.0;
  return detail::timed(r, [&](CheckResult &res) {
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const auto p = synthetic::random_problem(detail::mix(opt.seed, 3000 + rep), 1,
                                               1 + rep % 2, 1 + rep % 5);
      const Collection &c = p.collections[0];
      const KernelParams &eta = p.params.eta[0];
      const Eigen::VectorXd s = informative_timestamps(p.params.theta, p.params.z[0]);
      const double sigma = p.params.hyper.sigma;
      const auto post = fit_posterior(c, eta, s, sigma, kDefaultJitter);
      const auto dense = reference::posterior(c, eta, s, sigma, post.k_ss.jitter_used);
      const Eigen::VectorXd query = Eigen::VectorXd::LinSpaced(9, 0.0, kMaxForecastTime);
      const auto pred = predict(post, eta, query);
      const auto [mean, cov] = reference::predict(dense, eta, s, query, post.k_ss.jitter_used);
      worst = std::max({worst, (post.mean - dense.mean).cwiseAbs().maxCoeff(),
                        (post.covariance - dense.covariance).cwiseAbs().maxCoeff(),
                        (pred.mean - mean).cwiseAbs().maxCoeff(),
                        (pred.variance - cov.diagonal()).cwiseAbs().maxCoeff()});
    }
    res.accurate = worst <= 1e-8;
    res.metrics = {{"max_abs_gap", worst}};
  });
}

inline CheckResult gradient_suite(const Options &opt) {
  CheckResult r{"gradient_suite",
                "20 instances over L in {2,3}, J in {1,2}, m in {2,5}: analytic vs central "
                "differences (h = 1e-5) within 1e-4 relative"};
  r.time_limit = 30.0;
  return detail::timed(r, [&](CheckResult &res) {
    double worst = 0.0;
    std::size_t coordinates = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const int classes = 2 + rep % 2;
      const int J = 1 + (rep / 2) % 2;
      const int m = (rep / 4) % 2 == 0 ? 2 : 5;
      const auto p = synthetic::random_problem(detail::mix(opt.seed, 4000 + rep), classes, J, m);
      const std::span<const Collection> cs(p.collections);
      const Eigen::VectorXd x = pack_params(p.params);
      const Eigen::VectorXd analytic = pack_gradient(loss_gradient(cs, p.params, opt.threads));
      const Eigen::VectorXd fd = reference::finite_difference(
          [&](const Eigen::VectorXd &v) {
            return total_loss(cs, unpack_params(v, p.params), opt.threads);
          },
          x, 1e-5);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        worst = std::max(worst, detail::relative_error(analytic[i], fd[i]));
      }
      coordinates += static_cast<std::size_t>(x.size());
    }
    res.accurate = worst <= 1e-4;
    res.metrics = {{"max_relative_error", worst}, {"coordinates", coordinates}};
  });
}

inline CheckResult monotone_refinement(const Options &opt) {
  CheckResult r{"monotone_refinement",
                "10 instances: bound with one added inducing timestamp >= bound - 1e-8"};
  return detail::timed(r, [&](CheckResult &res) {
    Rng rng(detail::mix(opt.seed, 5));
    double worst_drop = -std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 10; ++rep) {
      const Collection c = synthetic::random_collection(
          rng, 0, {rng.uniform_int(4, 9), rng.uniform_int(4, 9)});
      const KernelParams kp = synthetic::random_kernel(rng, 1 + rep % 2, -0.5, 0.5, 1.0, 3.0);
      Eigen::VectorXd s = synthetic::stratified_times(rng, rng.uniform_int(2, 4));
      const double sigma = rng.uniform(0.2, 0.5);
      const double before = lmax_bound(c, kp, s, sigma, kDefaultJitter);
      s.conservativeResize(s.size() + 1);
      s[s.size() - 1] = rng.uniform(0.05, 0.95);
      const double after = lmax_bound(c, kp, s, sigma, kDefaultJitter);
      worst_drop = std::max(worst_drop, before - after);
    }
    res.accurate = worst_drop <= 1e-8;
    res.metrics = {{"max_drop", worst_drop}};
  });
}

inline CheckResult synthetic_classification(const Options &opt) {
  CheckResult r{"synthetic_classification",
                "sine vs ramp, 10 train / 20 test per class, lengths 40-60, noise 0.3, "
                "defaults: mean accuracy over 5 seeds >= 0.90"};
  r.time_limit = 60.0;
  return detail::timed(r, [&](CheckResult &res) {
    json per_seed = json::array();
    double sum = 0.0;
    for (std::uint64_t k = 1; k <= 5; ++k) {
      const std::uint64_t seed = opt.seed + k;
      const auto data = synthetic::sine_ramp_benchmark(seed);
      const Dataset train_ds = make_dataset(data.train, {synthetic::kUnitTime, std::nullopt});
      const Dataset test_ds =
          make_dataset(data.test, {synthetic::kUnitTime, train_ds.value_scale()});
      const auto trained = train(train_ds, Hyperparams{}, opt.threads);
      const auto posts = fit_all_posteriors(trained.params, train_ds, opt.threads);
      int correct = 0;
      int total = 0;
      for (const auto &col : test_ds.collections()) {
        for (const auto &s : col.series()) {
          const auto c = classify(trained.params, posts, s.timestamps(), s.values());
          correct += c.label == col.label() ? 1 : 0;
          ++total;
        }
      }
      const double acc = static_cast<double>(correct) / total;
      sum += acc;
      per_seed.push_back({{"seed", seed},
                          {"accuracy", acc},
                          {"final_loss", trained.trace.loss},
                          {"iterations", trained.trace.iterations}});
    }
    const double mean = sum / 5.0;
    res.accurate = mean >= 0.90;
    res.metrics = {{"mean_accuracy", mean}, {"per_seed", per_seed}};
  });
}

/// Class-level RMSE in original units of the sine class after an 80/20 split
/// in time, for Motion Code and for repeating each series' last training value.
struct ForecastScore {
  double motion_code = 0.0;
  double last_seen = 0.0;
};

inline ForecastScore forecast_score(const Dataset &full, int label, int threads = 1) {
  const auto [train_ds, test_ds] = forecast_split(full, 0.8);
  const auto trained = train(train_ds, Hyperparams{}, threads);
  const auto post = fit_class_posterior(trained.params, train_ds, label);
  const auto &vs = full.value_scale();
  const auto &train_series = train_ds.collection(label).series();
  const auto &test_series = test_ds.collection(label).series();
  double se_mc = 0.0;
  double se_last = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < test_series.size(); ++i) {
    const TimeSeries &te = test_series[i];
    const TimeSeries &tr = train_series[i];
    const Prediction p = predict(post, trained.params.eta[static_cast<std::size_t>(label)],
                                 te.timestamps());
    const double last = vs.to_original(tr.values()[tr.size() - 1]);
    for (Eigen::Index j = 0; j < te.size(); ++j) {
      const double y = vs.to_original(te.values()[j]);
      se_mc += std::pow(y - vs.to_original(p.mean[j]), 2);
      se_last += std::pow(y - last, 2);
      ++n;
    }
  }
  return {std::sqrt(se_mc / static_cast<double>(n)),
          std::sqrt(se_last / static_cast<double>(n))};
}

inline CheckResult synthetic_forecasting(const Options &opt) {
  CheckResult r{"synthetic_forecasting",
                "sine class, 80/20 split in time: Motion Code RMSE <= Last-Seen RMSE on >= 4 "
                "of 5 seeds"};
  r.time_limit = 60.0;
  return detail::timed(r, [&](CheckResult &res) {
    json per_seed = json::array();
    int wins = 0;
    for (std::uint64_t k = 1; k <= 5; ++k) {
      const std::uint64_t seed = opt.seed + k;
      const auto data = synthetic::sine_ramp_benchmark(seed);
      const Dataset full = make_dataset(data.train, {synthetic::kUnitTime, std::nullopt});
      const ForecastScore score = forecast_score(full, 0, opt.threads);
      const bool win = score.motion_code <= score.last_seen;
      wins += win ? 1 : 0;
      per_seed.push_back({{"seed", seed},
                          {"rmse_motion_code", score.motion_code},
                          {"rmse_last_seen", score.last_seen},
                          {"motion_code_better", win}});
    }
    res.accurate = wins >= 4;
    res.metrics = {{"seeds_won", wins}, {"per_seed", per_seed}};
  });
}

/// Best-of-`repeats` training time at 2000 and 4000 total points (fixed m
/// and M, series of 50 points), ratio <= 2.6.
inline CheckResult complexity_scaling(const Options &opt, int repeats = 9) {
  CheckResult r{"complexity_scaling",
                "training time ratio for N = 4000 vs N = 2000 (fixed m, M) <= 2.6"};
  r.timing_based = true;
  return detail::timed(r, [&](CheckResult &res) {
    const auto fit_time = [&](int per_class, Eigen::Index &points, int &iterations) {
      synthetic::BenchmarkSpec spec;
      spec.train_per_class = per_class;
      spec.test_per_class = 1;
      spec.min_len = 50;
      spec.max_len = 50;
      const auto data = synthetic::sine_ramp_benchmark(opt.seed + 1, spec);
      const Dataset ds = make_dataset(data.train, {synthetic::kUnitTime, std::nullopt});
      points = ds.total_points();
      Hyperparams h;
      h.epsilon = std::numeric_limits<double>::min(); // always run M iterations
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < repeats; ++k) {
        const auto start = std::chrono::steady_clock::now();
        const auto out = train(ds, h, 1);
        best = std::min(best, detail::elapsed(start));
        iterations = out.trace.iterations;
      }
      return best;
    };
    Eigen::Index n_small = 0;
    Eigen::Index n_large = 0;
    int it_small = 0;
    int it_large = 0;
    const double t_small = fit_time(20, n_small, it_small);
    const double t_large = fit_time(40, n_large, it_large);
    const double ratio = t_large / t_small;
    res.accurate = ratio <= 2.6;
    res.timing_metrics = {{"points_small", n_small},   {"points_large", n_large},
                          {"seconds_small", t_small},  {"seconds_large", t_large},
                          {"iterations_small", it_small}, {"iterations_large", it_large},
                          {"ratio", ratio},            {"limit", 2.6}};
  });
}

inline std::vector<CheckResult> run_all(const Options &opt) {
  std::vector<CheckResult> out;
  out.push_back(bound_collapse(opt));
  out.push_back(woodbury_vs_dense(opt));
  out.push_back(posterior_oracle(opt));
  out.push_back(gradient_suite(opt));
  out.push_back(monotone_refinement(opt));
  out.push_back(synthetic_classification(opt));
  out.push_back(synthetic_forecasting(opt));
  if (opt.complexity) {
    out.push_back(complexity_scaling(opt));
  }
  return out;
}

/// One line per check: PASS/FAIL, name, metrics and runtime against its limit.
inline std::string summary_line(const CheckResult &r) {
  std::string line = (r.passed() ? "PASS " : "FAIL ") + r.name + ": ";
  line += r.timing_based ? r.timing_metrics.dump() : r.metrics.dump();
  char buf[96];
  if (r.time_limit > 0.0) {
    std::snprintf(buf, sizeof buf, " [%.3f s, limit %.0f s]", r.seconds, r.time_limit);
  } else {
    std::snprintf(buf, sizeof buf, " [%.3f s]", r.seconds);
  }
  return line + buf;
}

/// Deterministic part of the results, suitable for byte comparison.
inline json deterministic_report(const std::vector<CheckResult> &results) {
  json checks = json::array();
  for (const auto &r : results) {
    if (r.timing_based) {
      continue;
    }
    checks.push_back({{"name", r.name},
                      {"description", r.description},
                      {"within_tolerance", r.accurate},
                      {"metrics", r.metrics}});
  }
  return checks;
}

inline json timing_report(const std::vector<CheckResult> &results) {
  json checks = json::array();
  for (const auto &r : results) {
    json entry = {{"name", r.name},
                  {"seconds", r.seconds},
                  {"time_limit", r.time_limit > 0.0 ? json(r.time_limit) : json(nullptr)},
                  {"passed", r.passed()}};
    if (r.timing_based) {
      entry["metrics"] = r.timing_metrics;
    }
    checks.push_back(entry);
  }
  return checks;
}

} // namespace motion_code::acceptance

#endif
