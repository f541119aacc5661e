#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "motion_code/dense_reference.hpp"
#include "test_support.hpp"

namespace mc = motion_code;
namespace ref = motion_code::reference;
using mc::testing::random_problem;

namespace {

Eigen::VectorXd linspace(Eigen::Index n, double lo, double hi) {
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

mc::TimeSeries constant_series(Eigen::Index n, double value) {
  return {linspace(n, 0.0, 1.0), Eigen::VectorXd::Constant(n, value)};
}

mc::TimeSeries sine_series(const Eigen::VectorXd &t) {
  return {t, (2.0 * std::numbers::pi * t.array()).sin().matrix()};
}

} // namespace

TEST(FitPosterior, MatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = random_problem(seed + 500, 1, 1 + static_cast<int>(seed % 2),
                                  2 + static_cast<int>(seed % 4));
    const auto &c = p.collections[0];
    const auto &eta = p.params.eta[0];
    const Eigen::VectorXd s = mc::informative_timestamps(p.params.theta, p.params.z[0]);
    const double sigma = p.params.hyper.sigma;
    const auto post = mc::fit_posterior(c, eta, s, sigma, 1e-6);
    const auto dense = ref::posterior(c, eta, s, sigma, post.k_ss.jitter_used);
    EXPECT_LE((post.mean - dense.mean).cwiseAbs().maxCoeff(), 1e-8) << "seed " << seed;
    EXPECT_LE((post.covariance - dense.covariance).cwiseAbs().maxCoeff(), 1e-8)
        << "seed " << seed;

    const Eigen::VectorXd query = linspace(7, 0.0, 1.2);
    const auto pred = mc::predict(post, eta, query);
    const auto [mean, cov] = ref::predict(dense, eta, s, query, post.k_ss.jitter_used);
    EXPECT_LE((pred.mean - mean).cwiseAbs().maxCoeff(), 1e-8) << "seed " << seed;
    EXPECT_LE((pred.variance - cov.diagonal()).cwiseAbs().maxCoeff(), 1e-8)
        << "seed " << seed;
  }
}

TEST(FitPosterior, ZeroDataGivesZeroMean) {
  const mc::Collection c(0, {constant_series(9, 0.0), constant_series(5, 0.0)});
  const auto eta = mc::KernelParams::unit(1);
  const Eigen::VectorXd s = linspace(4, 0.1, 0.9);
  const auto post = mc::fit_posterior(c, eta, s, 0.1, 1e-6);
  EXPECT_EQ(post.mean, Eigen::VectorXd::Zero(4));
  const auto pred = mc::predict(post, eta, linspace(11, 0.0, 1.25));
  EXPECT_EQ(pred.mean, Eigen::VectorXd::Zero(11));

  // A depends only on timestamps, not values.
  const mc::Collection other(0, {constant_series(9, 3.0), constant_series(5, -1.0)});
  const auto post2 = mc::fit_posterior(other, eta, s, 0.1, 1e-6);
  EXPECT_EQ(post.covariance, post2.covariance);
}

TEST(FitPosterior, RejectsInducingOutsideUnitInterval) {
  const mc::Collection c(0, {constant_series(4, 1.0)});
  Eigen::VectorXd s(2);
  s << 0.0, 0.5;
  EXPECT_THROW(mc::fit_posterior(c, mc::KernelParams::unit(1), s, 0.1, 1e-6),
               mc::RangeError);
}

TEST(Predict, AtInducingPointsRecoversMeanAndCovariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_problem(seed + 900, 1, 1, 4);
    const auto &eta = p.params.eta[0];
    const Eigen::VectorXd s = mc::informative_timestamps(p.params.theta, p.params.z[0]);
    const auto post = mc::fit_posterior(p.collections[0], eta, s, p.params.hyper.sigma, 1e-12);
    ASSERT_EQ(post.k_ss.jitter_used, 1e-12);
    const auto pred = mc::predict(post, eta, s);
    const double scale = std::max(1.0, post.mean.cwiseAbs().maxCoeff());
    EXPECT_LE((pred.mean - post.mean).cwiseAbs().maxCoeff(), 1e-6 * scale);
    EXPECT_LE((pred.variance - post.covariance.diagonal()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Predict, VarianceIsNonNegative) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_problem(seed + 1300, 1, 2, 5);
    const auto &eta = p.params.eta[0];
    const Eigen::VectorXd s = mc::informative_timestamps(p.params.theta, p.params.z[0]);
    const auto post = mc::fit_posterior(p.collections[0], eta, s, p.params.hyper.sigma, 1e-6);
    const auto pred = mc::predict(post, eta, linspace(50, 0.0, 1.25));
    EXPECT_GE(pred.variance.minCoeff(), 0.0);
  }
}

TEST(Predict, SmallNoiseInterpolates) {
  mc::Rng rng(12);
  const Eigen::VectorXd t = mc::synthetic::stratified_times(rng, 8);
  const mc::TimeSeries series = sine_series(t);
  const mc::Collection c(0, {series});
  const auto eta = mc::KernelParams::from_natural(Eigen::VectorXd::Ones(1),
                                                  Eigen::VectorXd::Constant(1, 30.0));
  const auto post = mc::fit_posterior(c, eta, t, 1e-4, 1e-6);
  const auto pred = mc::predict(post, eta, t);
  EXPECT_LE((pred.mean - series.values()).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(Predict, PosteriorContractsAsNoiseShrinks) {
  mc::Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const mc::TimeSeries series = mc::synthetic::random_series(rng, 8);
    const Eigen::VectorXd t = series.timestamps();
    if (t[0] <= 0.0 || t[t.size() - 1] >= 1.0) {
      continue;
    }
    const mc::Collection c(0, {series});
    const auto eta = mc::synthetic::random_kernel(rng, 1, -0.5, 0.5, 2.0, 4.0);
    double previous = INFINITY;
    for (double sigma : {1.0, 0.1, 0.01}) {
      const auto post = mc::fit_posterior(c, eta, t, sigma, 1e-6);
      const double err = (mc::predict(post, eta, t).mean - series.values()).norm();
      EXPECT_LE(err, previous + 1e-12) << "rep " << rep << " sigma " << sigma;
      previous = err;
    }
  }
}

TEST(Predict, RejectsEmptyOrNonFiniteQuery) {
  const mc::Collection c(0, {constant_series(4, 1.0)});
  const auto eta = mc::KernelParams::unit(1);
  const auto post = mc::fit_posterior(c, eta, linspace(3, 0.2, 0.8), 0.1, 1e-6);
  EXPECT_THROW(mc::predict(post, eta, Eigen::VectorXd()), mc::ValidationError);
  EXPECT_THROW(mc::predict(post, eta, Eigen::VectorXd::Constant(1, NAN)), mc::DomainError);
}

namespace {

mc::Dataset zero_and_sine_dataset() {
  std::vector<mc::TimeSeries> zeros{constant_series(12, 0.0), constant_series(7, 0.0)};
  std::vector<mc::TimeSeries> sines{sine_series(linspace(30, 0.0, 1.0))};
  return {{mc::Collection(0, zeros), mc::Collection(1, sines)}, {0.0, 1.0}};
}

} // namespace

TEST(Forecast, ZeroClassForecastsZero) {
  const auto ds = zero_and_sine_dataset();
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const auto pred = mc::forecast(model, ds, 0, linspace(20, 0.0, 1.25));
  EXPECT_LE(pred.mean.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Forecast, SineWithinTolerance) {
  const auto ds = zero_and_sine_dataset();
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const Eigen::VectorXd query = linspace(41, 0.05, 0.95);
  const auto pred = mc::forecast(model, ds, 1, query);
  for (Eigen::Index i = 0; i < query.size(); ++i) {
    const double truth = std::sin(2.0 * std::numbers::pi * query[i]);
    EXPECT_NEAR(pred.mean[i], truth, 0.1) << "t = " << query[i];
  }
}

TEST(Forecast, Errors) {
  const auto ds = zero_and_sine_dataset();
  const auto model = mc::init_params(2, mc::Hyperparams{});
  EXPECT_THROW(mc::forecast(model, ds, 2, linspace(3, 0.0, 1.0)), mc::LookupError);
  EXPECT_THROW(mc::forecast(model, ds, 0, linspace(3, 0.0, 1.3)), mc::RangeError);
  const auto three = mc::init_params(3, mc::Hyperparams{});
  EXPECT_THROW(mc::forecast(three, ds, 0, linspace(3, 0.0, 1.0)), mc::ValidationError);
}

namespace {

mc::Dataset constant_classes_dataset() {
  std::vector<mc::RaggedRecord> records;
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < 3; ++i) {
      mc::RaggedRecord r;
      r.label = label;
      r.t = {0.0, 0.2, 0.45, 0.7, 1.0};
      r.y.assign(r.t.size(), label == 0 ? 0.0 : 10.0);
      records.push_back(r);
    }
  }
  return mc::make_dataset(records, {});
}

} // namespace

TEST(Classify, ConstantClasses) {
  const auto ds = constant_classes_dataset();
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const Eigen::VectorXd t = linspace(6, 0.0, 1.0);
  // 0.2 in original units, mapped with the dataset's global scaling.
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(6, ds.value_scale().normalize(0.2));
  const auto posts = mc::fit_all_posteriors(model, ds);
  const auto r = mc::classify(model, posts, t, y);
  EXPECT_EQ(r.label, 0);
  EXPECT_LT(r.distances[0], r.distances[1]);
}

TEST(Classify, ReturnsArgminAndExactMatchHasZeroDistance) {
  const auto ds = constant_classes_dataset();
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const auto posts = mc::fit_all_posteriors(model, ds);
  const Eigen::VectorXd t = linspace(9, 0.0, 1.0);
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd pk = mc::predict(posts[static_cast<std::size_t>(k)],
                                           model.eta[static_cast<std::size_t>(k)], t)
                                   .mean;
    const auto r = mc::classify(model, posts, t, pk);
    EXPECT_EQ(r.label, k);
    EXPECT_EQ(r.distances[k], 0.0);
    Eigen::Index argmin = 0;
    r.distances.minCoeff(&argmin);
    EXPECT_EQ(argmin, r.label);
  }
}

TEST(Classify, TiesGoToSmallerLabel) {
  // Identical classes produce identical predictions, hence equal distances.
  const mc::Collection a(0, {constant_series(6, 1.0)});
  const mc::Collection b(1, {constant_series(6, 1.0)});
  const mc::Dataset ds({a, b}, {0.0, 1.0});
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const auto r = mc::classify(model, ds, constant_series(6, 0.5));
  EXPECT_EQ(r.distances[0], r.distances[1]);
  EXPECT_EQ(r.label, 0);
}

TEST(Classify, InvariantUnderRawRescaling) {
  const auto data = mc::synthetic::sine_ramp_benchmark(7);
  std::vector<int> labels[2];
  for (int v = 0; v < 2; ++v) {
    const double c = v == 0 ? 1.0 : 37.5;
    auto train = data.train;
    auto test = data.test;
    for (auto *set : {&train, &test}) {
      for (auto &r : *set) {
        for (double &y : r.y) {
          y *= c;
        }
      }
    }
    const auto ds = mc::make_dataset(train, {mc::synthetic::kUnitTime, std::nullopt});
    const auto model = mc::train(ds, mc::Hyperparams{}).params;
    const auto posts = mc::fit_all_posteriors(model, ds);
    const auto test_ds = mc::make_dataset(test, {mc::synthetic::kUnitTime, ds.value_scale()});
    for (const auto &col : test_ds.collections()) {
      for (const auto &s : col.series()) {
        labels[v].push_back(mc::classify(model, posts, s.timestamps(), s.values()).label);
      }
    }
  }
  EXPECT_EQ(labels[0], labels[1]);
}

TEST(Classify, DistancesScaleWithData) {
  // Fixed parameters: y -> c y, sigma -> c sigma, alpha -> c^2 alpha scales
  // every predicted mean, and therefore every distance, by c.
  const auto p = random_problem(77, 2, 1, 4);
  const double c = 3.5;
  std::vector<mc::Collection> scaled;
  for (const auto &col : p.collections) {
    std::vector<mc::TimeSeries> series;
    for (const auto &s : col.series()) {
      series.emplace_back(s.timestamps(), Eigen::VectorXd(c * s.values()));
    }
    scaled.emplace_back(col.label(), series);
  }
  auto model = p.params;
  auto model_c = p.params;
  model_c.hyper.sigma *= c;
  for (auto &eta : model_c.eta) {
    eta.log_amplitudes.array() += 2.0 * std::log(c);
  }
  const mc::Dataset ds(p.collections, {0.0, 1.0});
  const mc::Dataset ds_c(scaled, {0.0, 1.0});
  const auto posts = mc::fit_all_posteriors(model, ds);
  const auto posts_c = mc::fit_all_posteriors(model_c, ds_c);
  mc::Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const mc::TimeSeries q = mc::synthetic::random_series(rng, 6);
    const auto r = mc::classify(model, posts, q.timestamps(), q.values());
    const auto rc =
        mc::classify(model_c, posts_c, q.timestamps(), Eigen::VectorXd(c * q.values()));
    EXPECT_EQ(r.label, rc.label);
    for (Eigen::Index k = 0; k < 2; ++k) {
      EXPECT_NEAR(rc.distances[k], c * r.distances[k], 1e-6 * c * r.distances[k]);
    }
  }
}

TEST(Classify, SyntheticBenchmarkAccuracy) {
  const auto data = mc::synthetic::sine_ramp_benchmark(1);
  const auto ds = mc::make_dataset(data.train, {mc::synthetic::kUnitTime, std::nullopt});
  const auto model = mc::train(ds, mc::Hyperparams{}).params;
  const auto posts = mc::fit_all_posteriors(model, ds);
  const auto test = mc::make_dataset(data.test, {mc::synthetic::kUnitTime, ds.value_scale()});
  int correct = 0;
  int total = 0;
  for (const auto &col : test.collections()) {
    for (const auto &s : col.series()) {
      correct += mc::classify(model, posts, s.timestamps(), s.values()).label == col.label();
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(correct) / total, 0.9);
}
