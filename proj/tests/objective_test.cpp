#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "motion_code/dense_reference.hpp"
#include "motion_code/motion_code.hpp"
#include "test_support.hpp"

namespace mc = motion_code;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

mc::Collection single(const VectorXd &t, const VectorXd &y) {
  return mc::Collection(0, {mc::TimeSeries(t, y)});
}

} // namespace

TEST(InformativeTimestamps, ZeroPreactivationGivesHalf) {
  MatrixXd theta(3, 2);
  theta << 1, -1, 2, -2, 0, 0;
  const VectorXd s = mc::informative_timestamps(theta, VectorXd::Ones(2));
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(s[i], 0.5);
  }
}

TEST(InformativeTimestamps, SaturationStaysInsideOpenInterval) {
  MatrixXd theta(2, 1);
  theta << -50, 50;
  const VectorXd s = mc::informative_timestamps(theta, VectorXd::Ones(1));
  EXPECT_NEAR(s[0], 1.9287498479639178e-22, 1e-30);
  EXPECT_GT(s[0], 0.0);
  EXPECT_LT(s[1], 1.0);
  EXPECT_GT(s[1], 1.0 - 1e-15);
}

TEST(InformativeTimestamps, LogThreeGivesQuarters) {
  MatrixXd theta(2, 1);
  theta << 1, -1;
  VectorXd z(1);
  z << std::log(3.0);
  const VectorXd s = mc::informative_timestamps(theta, z);
  EXPECT_NEAR(s[0], 0.75, 1e-15);
  EXPECT_NEAR(s[1], 0.25, 1e-15);
}

TEST(InformativeTimestamps, DimensionMismatchThrows) {
  EXPECT_THROW(mc::informative_timestamps(MatrixXd::Ones(3, 2), VectorXd::Ones(3)),
               mc::ValidationError);
}

TEST(LmaxBound, CollapsesToExactMarginalWhenInducingSetIsData) {
  mc::Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto n = static_cast<Eigen::Index>(rng.uniform_int(2, 10));
    const mc::TimeSeries s = mc::synthetic::random_series(rng, n);
    const mc::KernelParams kp = mc::synthetic::random_kernel(rng, 1, -0.5, 0.5, 5.0, 6.0);
    const mc::Collection c(0, {s});
    const double sigma = rng.uniform(0.2, 1.0);
    const auto ws = mc::build_bound_workspace(c, kp, s.timestamps(), sigma, 1e-12);
    EXPECT_LE(ws.trace, 1e-8);
    EXPECT_NEAR(ws.bound, mc::reference::exact_log_marginal(s, kp, sigma), 1e-8);
  }
}

TEST(LmaxBound, ZeroDataLeavesOnlyNormalizer) {
  VectorXd t(2);
  t << 0.2, 0.7;
  const mc::Collection c = single(t, VectorXd::Zero(2));
  const mc::KernelParams kp = mc::KernelParams::unit(1);
  VectorXd s(2);
  s << 0.3, 0.6;
  const double sigma = 0.3;
  const double jitter = 1e-6;
  const MatrixXd kss = mc::reference::gram(kp, s, s) + jitter * MatrixXd::Identity(2, 2);
  const MatrixXd kts = mc::reference::gram(kp, t, s);
  const MatrixXd cov = sigma * sigma * MatrixXd::Identity(2, 2) +
                       kts * kss.inverse() * kts.transpose();
  const auto ws = mc::build_bound_workspace(c, kp, s, sigma, jitter);
  EXPECT_NEAR(ws.log_density, -std::log(2.0 * std::numbers::pi) -
                                  0.5 * std::log(cov.determinant()),
              1e-10);
}

TEST(LmaxBound, WoodburyMatchesDenseConstruction) {
  mc::Rng rng(5);
  for (int rep = 0; rep < 25; ++rep) {
    const mc::Collection c = mc::synthetic::random_collection(rng, 0, {4, 6, 8});
    const mc::KernelParams kp = mc::synthetic::random_kernel(rng, 2, -0.5, 0.5, 1.0, 3.0);
    const VectorXd s = mc::synthetic::stratified_times(rng, 3);
    const double sigma = rng.uniform(0.1, 0.6);
    const double fast = mc::lmax_bound(c, kp, s, sigma, 1e-6);
    const auto dense = mc::reference::lmax_bound(c, kp, s, sigma, 1e-6);
    EXPECT_NEAR(fast, dense.bound, 1e-8);
  }
}

TEST(LmaxBound, MoreInducingPointsNeverLowerTheBound) {
  mc::Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const mc::Collection c = mc::synthetic::random_collection(rng, 0, {6, 7});
    const mc::KernelParams kp = mc::synthetic::random_kernel(rng, 1, -0.5, 0.5, 1.0, 3.0);
    VectorXd s = mc::synthetic::stratified_times(rng, 3);
    double previous = mc::lmax_bound(c, kp, s, 0.3, 1e-8);
    for (int add = 0; add < 3; ++add) {
      s.conservativeResize(s.size() + 1);
      s[s.size() - 1] = rng.uniform(0.05, 0.95);
      const double next = mc::lmax_bound(c, kp, s, 0.3, 1e-8);
      EXPECT_GE(next, previous - 1e-8);
      previous = next;
    }
  }
}

TEST(LmaxBound, TraceTermsAreNonNegative) {
  mc::Rng rng(3);
  const mc::Collection c = mc::synthetic::random_collection(rng, 0, {5, 9});
  const auto ws = mc::build_bound_workspace(c, mc::KernelParams::unit(1),
                                            mc::synthetic::stratified_times(rng, 4),
                                            0.2, 1e-6);
  for (const auto &blk : ws.blocks) {
    EXPECT_GE(blk.trace, 0.0);
  }
}

TEST(TotalLoss, SingleClassWithoutPenaltyIsNegatedBound) {
  mc::Rng rng(2);
  const std::vector<mc::Collection> cs{mc::synthetic::random_collection(rng, 0, {5, 6})};
  mc::Hyperparams h;
  h.m = 4;
  h.lambda = 0.0;
  mc::ModelParams p = mc::init_params(1, h);
  const VectorXd s = mc::informative_timestamps(p.theta, p.z[0]);
  EXPECT_DOUBLE_EQ(mc::total_loss(cs, p),
                   -mc::lmax_bound(cs[0], p.eta[0], s, h.sigma, h.jitter));
}

TEST(TotalLoss, ZeroMotionCodesAddNoPenalty) {
  mc::Rng rng(2);
  const std::vector<mc::Collection> cs{mc::synthetic::random_collection(rng, 0, {5, 6})};
  mc::Hyperparams h;
  h.m = 4;
  h.lambda = 7.0;
  mc::ModelParams p = mc::init_params(1, h);
  p.z[0].setZero();
  mc::ModelParams unpenalized = p;
  unpenalized.hyper.lambda = 0.0;
  EXPECT_DOUBLE_EQ(mc::total_loss(cs, p), mc::total_loss(cs, unpenalized));
}

TEST(TotalLoss, IdenticalClassesContributeEqually) {
  mc::Rng rng(4);
  const mc::Collection c = mc::synthetic::random_collection(rng, 0, {5, 7});
  const std::vector<mc::Collection> two{c, mc::Collection(1, c.series())};
  mc::Hyperparams h;
  h.m = 3;
  mc::ModelParams p2 = mc::init_params(2, h);
  mc::ModelParams p1 = mc::init_params(1, h);
  p1.hyper.lambda = 0.0;
  const double bound = -mc::total_loss(std::vector<mc::Collection>{c}, p1);
  const double penalty = h.lambda * (p2.z[0].squaredNorm() + p2.z[1].squaredNorm());
  EXPECT_NEAR(mc::total_loss(two, p2), -2.0 * bound + penalty, 1e-12);
}

TEST(TotalLoss, SeriesOrderDoesNotMatter) {
  mc::Rng rng(9);
  auto problem = mc::testing::random_problem(9, 2, 1, 3);
  const double base = mc::total_loss(problem.collections, problem.params);
  for (auto &c : problem.collections) {
    auto series = c.series();
    std::reverse(series.begin(), series.end());
    c = mc::Collection(c.label(), series);
  }
  EXPECT_NEAR(mc::total_loss(problem.collections, problem.params), base, 1e-12);
}

TEST(TotalLoss, ParallelEvaluationIsBitIdentical) {
  auto problem = mc::testing::random_problem(21, 3, 2, 4);
  EXPECT_EQ(mc::total_loss(problem.collections, problem.params, 1),
            mc::total_loss(problem.collections, problem.params, 3));
  EXPECT_TRUE(mc::pack_gradient(mc::loss_gradient(problem.collections, problem.params, 1)) ==
              mc::pack_gradient(mc::loss_gradient(problem.collections, problem.params, 3)));
}

TEST(LossGradient, PenaltyTermAppearsInMotionCodeGradient) {
  auto problem = mc::testing::random_problem(13, 2, 1, 3);
  mc::ModelParams without = problem.params;
  without.hyper.lambda = 0.0;
  const auto g = mc::loss_gradient(problem.collections, problem.params);
  const auto g0 = mc::loss_gradient(problem.collections, without);
  for (std::size_t k = 0; k < 2; ++k) {
    const VectorXd diff = g.d_z[k] - g0.d_z[k];
    const VectorXd expected = 2.0 * problem.params.hyper.lambda * problem.params.z[k];
    EXPECT_LT((diff - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LossGradient, MatchesFiniteDifferencesAcrossSeeds) {
  int seed = 100;
  for (int classes : {2, 3}) {
    for (int J : {1, 2}) {
      for (int m : {2, 5}) {
        for (int rep = 0; rep < 3; ++rep, ++seed) {
          const auto problem = mc::testing::random_problem(seed, classes, J, m);
          const auto &cs = problem.collections;
          const VectorXd x = mc::pack_params(problem.params);
          const VectorXd analytic =
              mc::pack_gradient(mc::loss_gradient(cs, problem.params));
          const VectorXd fd = mc::reference::finite_difference(
              [&](const VectorXd &v) {
                return mc::total_loss(cs, mc::unpack_params(v, problem.params));
              },
              x, 1e-5);
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            EXPECT_LT(mc::testing::relative_error(analytic[i], fd[i]), 1e-4)
                << "seed " << seed << " coordinate " << i << " analytic "
                << analytic[i] << " fd " << fd[i];
          }
        }
      }
    }
  }
}

TEST(LossGradient, AmplitudeGradientOnZeroData) {
  VectorXd t(5);
  t << 0.1, 0.3, 0.45, 0.7, 0.9;
  const std::vector<mc::Collection> cs{
      single(t, VectorXd::Zero(5)), mc::Collection(1, {mc::TimeSeries(t, VectorXd::Ones(5))})};
  mc::Hyperparams h;
  h.m = 3;
  h.J = 1;
  h.sigma = 0.3;
  const mc::ModelParams p = mc::init_params(2, h);
  const auto g = mc::loss_gradient(cs, p);
  const auto f = [&](double log_amp) {
    mc::ModelParams q = p;
    q.eta[0].log_amplitudes[0] = log_amp;
    return mc::total_loss(cs, q);
  };
  const double fd = (f(1e-5) - f(-1e-5)) / 2e-5;
  EXPECT_LT(mc::testing::relative_error(g.d_log_amplitudes[0][0], fd), 1e-4);
}

TEST(FlatParams, PackUnpackRoundTrip) {
  const auto problem = mc::testing::random_problem(31, 3, 2, 4);
  const VectorXd x = mc::pack_params(problem.params);
  const mc::ModelParams back = mc::unpack_params(x, problem.params);
  EXPECT_TRUE(mc::pack_params(back) == x);
  // Layout: log-eta class-major, then z, then theta row-major.
  EXPECT_EQ(x[0], problem.params.eta[0].log_amplitudes[0]);
  EXPECT_EQ(x[2], problem.params.eta[0].log_bandwidths[0]);
  const Eigen::Index z0 = 3 * 2 * 2;
  EXPECT_EQ(x[z0], problem.params.z[0][0]);
  EXPECT_EQ(x[z0 + 3 * 2 + 1], problem.params.theta(0, 1));
}
