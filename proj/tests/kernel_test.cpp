#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "motion_code/dense_reference.hpp"
#include "motion_code/motion_code.hpp"

namespace mc = motion_code;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    out[i++] = x;
  }
  return out;
}

mc::KernelParams natural(std::initializer_list<double> a, std::initializer_list<double> b) {
  return mc::KernelParams::from_natural(vec(a), vec(b));
}

Eigen::VectorXd uniform_vector(mc::Rng &rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (auto &x : v) {
    x = rng.uniform(lo, hi);
  }
  return v;
}

} // namespace

TEST(KernelEval, Examples) {
  EXPECT_DOUBLE_EQ(mc::kernel_eval(natural({1.5}, {2.0}), 0.3, 0.3), 1.5);
  const double lag = std::sqrt(2.0 * std::log(2.0));
  EXPECT_NEAR(mc::kernel_eval(natural({1.0}, {1.0}), 0.0, lag), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(mc::kernel_eval(natural({1.0, 2.0}, {1.0, 4.0}), 0.7, 0.7), 3.0);
}

TEST(KernelEval, RejectsNonFinite) {
  const auto p = mc::KernelParams::unit(1);
  EXPECT_THROW(mc::kernel_eval(p, std::nan(""), 0.0), mc::DomainError);
  EXPECT_THROW(mc::kernel_eval(p, 0.0, INFINITY), mc::DomainError);
}

TEST(KernelEval, ExactSymmetry) {
  mc::Rng rng(1);
  for (int rep = 0; rep < 500; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 3, -2, 2, -2, 5);
    const double t = rng.uniform(-1, 2);
    const double s = rng.uniform(-1, 2);
    EXPECT_EQ(mc::kernel_eval(p, t, s), mc::kernel_eval(p, s, t));
  }
}

TEST(KernelEval, MonotoneDecayInLag) {
  mc::Rng rng(2);
  for (int rep = 0; rep < 500; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 1, -2, 2, -2, 5);
    const double t = rng.uniform();
    double a = rng.uniform(-1, 1);
    double b = rng.uniform(-1, 1);
    if (std::abs(a) > std::abs(b)) {
      std::swap(a, b);
    }
    EXPECT_GE(mc::kernel_eval(p, t, t + a), mc::kernel_eval(p, t, t + b));
  }
}

TEST(KernelMatrix, SingleEntry) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd k = mc::kernel_matrix(mc::KernelParams::unit(1), zero, zero);
  ASSERT_EQ(k.rows(), 1);
  EXPECT_DOUBLE_EQ(k(0, 0), 1.0);
}

TEST(KernelMatrix, MatchesBruteForce) {
  mc::Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 2, -1, 1, 0, 4);
    const Eigen::VectorXd a = uniform_vector(rng, 7, -1, 1);
    const Eigen::VectorXd b = uniform_vector(rng, 5, -1, 1);
    const Eigen::MatrixXd k = mc::kernel_matrix(p, a, b);
    const Eigen::MatrixXd ref = mc::reference::gram(p, a, b);
    EXPECT_LE((k - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(KernelMatrix, SymmetricWithVarianceDiagonalAndPsd) {
  mc::Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 2, -1, 1, -1, 6);
    const Eigen::VectorXd a = mc::synthetic::stratified_times(rng, 25);
    const Eigen::MatrixXd k = mc::kernel_matrix(p, a, a);
    EXPECT_EQ((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(k(i, i), p.variance(), 1e-14 * p.variance());
    }
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff();
    EXPECT_GE(min_eig, -1e-10 * p.variance());
  }
}

TEST(KernelGradient, EntryMatchesFiniteDifferences) {
  mc::Rng rng(6);
  const double h = 1e-6;
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 2, -1, 1, 0, 3);
    const double t = rng.uniform();
    const double s = rng.uniform();
    const auto g = mc::kernel_entry_gradient(p, t, s);
    for (Eigen::Index j = 0; j < 2; ++j) {
      auto pp = p;
      auto pm = p;
      pp.log_amplitudes[j] += h;
      pm.log_amplitudes[j] -= h;
      const double fa = (mc::kernel_eval(pp, t, s) - mc::kernel_eval(pm, t, s)) / (2 * h);
      EXPECT_NEAR(g.d_log_amplitude[j], fa, 1e-8);
      pp = p;
      pm = p;
      pp.log_bandwidths[j] += h;
      pm.log_bandwidths[j] -= h;
      const double fb = (mc::kernel_eval(pp, t, s) - mc::kernel_eval(pm, t, s)) / (2 * h);
      EXPECT_NEAR(g.d_log_bandwidth[j], fb, 1e-8);
    }
    const double fs = (mc::kernel_eval(p, t, s + h) - mc::kernel_eval(p, t, s - h)) / (2 * h);
    EXPECT_NEAR(g.d_s, fs, 1e-7);
  }
}

TEST(KernelGradient, ContractionMatchesEntrywiseSum) {
  mc::Rng rng(7);
  const auto p = mc::synthetic::random_kernel(rng, 2, -1, 1, 0, 3);
  const Eigen::VectorXd rows = uniform_vector(rng, 6, -1, 1);
  const Eigen::VectorXd cols = uniform_vector(rng, 4, -1, 1);
  Eigen::MatrixXd w(6, 4);
  for (auto &x : w.reshaped()) {
    x = rng.normal();
  }
  const auto c = mc::contract_kernel_gradient(p, rows, cols, w);
  Eigen::VectorXd da = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd db = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd ds = Eigen::VectorXd::Zero(4);
  for (Eigen::Index a = 0; a < 6; ++a) {
    for (Eigen::Index b = 0; b < 4; ++b) {
      const auto g = mc::kernel_entry_gradient(p, rows[a], cols[b]);
      da += w(a, b) * g.d_log_amplitude.matrix();
      db += w(a, b) * g.d_log_bandwidth.matrix();
      ds[b] += w(a, b) * g.d_s;
    }
  }
  EXPECT_LE((c.d_log_amplitudes - da).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((c.d_log_bandwidths - db).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((c.d_cols - ds).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CholJittered, IdentityUsesBaseJitter) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  const auto f = mc::chol_jittered(eye, 1e-6);
  EXPECT_EQ(f.jitter_used, 1e-6);
  const Eigen::MatrixXd expected = (eye * (1.0 + 1e-6)).llt().matrixL();
  EXPECT_LE((f.lower - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CholJittered, RankOneReconstructs) {
  Eigen::VectorXd v(4);
  v << 1.0, -2.0, 0.5, 3.0;
  v.normalize();
  const Eigen::MatrixXd m = v * v.transpose();
  const auto f = mc::chol_jittered(m, 1e-6);
  EXPECT_LE(f.jitter_used, 1.0);
  const Eigen::MatrixXd target = m + f.jitter_used * Eigen::MatrixXd::Identity(4, 4);
  EXPECT_LE((f.reconstruct() - target).norm() / target.norm(), 1e-10);
}

TEST(CholJittered, IndefiniteReportsEigenvalue) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 0) = -1.0;
  try {
    mc::chol_jittered(m, 1e-6);
    FAIL() << "expected SingularityError";
  } catch (const mc::SingularityError &e) {
    EXPECT_NEAR(e.min_eigenvalue, -1.0, 1e-12);
  }
}

TEST(CholJittered, RejectsAsymmetric) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(mc::chol_jittered(m), mc::ValidationError);
}

TEST(CholJittered, ReconstructionOnKernelMatrices) {
  mc::Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = mc::synthetic::random_kernel(rng, 2, -1, 1, -2, 4);
    const Eigen::VectorXd a = uniform_vector(rng, 12, 0, 1);
    const Eigen::MatrixXd k = mc::kernel_matrix(p, a, a);
    const auto f = mc::chol_jittered(k);
    const Eigen::MatrixXd target =
        k + f.jitter_used * Eigen::MatrixXd::Identity(k.rows(), k.cols());
    EXPECT_LE((f.reconstruct() - target).norm() / target.norm(), 1e-10);
  }
}
