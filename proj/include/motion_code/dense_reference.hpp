#ifndef MOTION_CODE_DENSE_REFERENCE_HPP
#define MOTION_CODE_DENSE_REFERENCE_HPP

// Naive dense evaluations used as independent oracles by the test suites and
// the acceptance runner. Everything here builds full matrices and uses
// explicit inverses or dense factorizations on purpose; none of it shares code
// paths with the block/Woodbury implementation.

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "motion_code/core.hpp"

namespace motion_code::reference {

inline double kernel(const KernelParams &p, double t, double s) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < p.components(); ++j) {
    v += std::exp(p.log_amplitudes[j]) *
         std::exp(-0.5 * std::exp(p.log_bandwidths[j]) * (t - s) * (t - s));
  }
  return v;
}

inline Eigen::MatrixXd gram(const KernelParams &p, const Eigen::VectorXd &a,
                            const Eigen::VectorXd &b) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      k(i, j) = kernel(p, a[i], b[j]);
    }
  }
  return k;
}

/// log N(y | 0, cov) through a dense LDLT-free route: eigen-decomposition.
inline double gaussian_log_density(const Eigen::VectorXd &y,
                                   const Eigen::MatrixXd &cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * y;
  double logdet = 0.0;
  double quad = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    logdet += std::log(lam[i]);
    quad += proj[i] * proj[i] / lam[i];
  }
  return -0.5 * (static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) +
                 logdet + quad);
}

/// Exact GP log marginal likelihood log N(y | 0, sigma^2 I + K_TT).
inline double exact_log_marginal(const TimeSeries &s, const KernelParams &p,
                                 double sigma) {
  const auto n = s.size();
  const Eigen::MatrixXd cov = gram(p, s.timestamps(), s.timestamps()) +
                              sigma * sigma * Eigen::MatrixXd::Identity(n, n);
  return gaussian_log_density(s.values(), cov);
}

struct DenseBound {
  double bound = 0.0;
  double log_density = 0.0;
  double trace = 0.0;
};

/// The bound with the full stacked vector Y and block-diagonal Q^{C,G}:
/// log N(Y | 0, B sigma^2 I + Q) - 1/(2 sigma^2 B) sum Tr(K_ii - Q_ii),
/// with Q_ii = K_TS (K_SS + jitter I)^{-1} K_ST via an explicit inverse.
inline DenseBound lmax_bound(const Collection &c, const KernelParams &p,
                             const Eigen::VectorXd &s_m, double sigma,
                             double jitter) {
  const auto m = s_m.size();
  const Eigen::MatrixXd kss_inv =
      (gram(p, s_m, s_m) + jitter * Eigen::MatrixXd::Identity(m, m)).inverse();
  const Eigen::Index total = c.total_points();
  const double batch = static_cast<double>(c.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd y(total);
  double trace = 0.0;
  Eigen::Index o = 0;
  for (const auto &s : c.series()) {
    const auto n = s.size();
    const Eigen::MatrixXd kts = gram(p, s.timestamps(), s_m);
    const Eigen::MatrixXd qi = kts * kss_inv * kts.transpose();
    q.block(o, o, n, n) = qi;
    y.segment(o, n) = s.values();
    trace += (gram(p, s.timestamps(), s.timestamps()) - qi).trace();
    o += n;
  }
  const Eigen::MatrixXd cov =
      q + batch * sigma * sigma * Eigen::MatrixXd::Identity(total, total);
  DenseBound out;
  out.log_density = gaussian_log_density(y, cov);
  out.trace = trace;
  out.bound = out.log_density - trace / (2.0 * sigma * sigma * batch);
  return out;
}

struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// mu = sigma^-2 K_SS Sigma (1/B sum K_ST_i y_i), A = K_SS Sigma K_SS with
/// Sigma = Lambda^{-1} formed by explicit inversion.
inline DensePosterior posterior(const Collection &c, const KernelParams &p,
                                const Eigen::VectorXd &s_m, double sigma,
                                double jitter) {
  const auto m = s_m.size();
  const double batch = static_cast<double>(c.size());
  const Eigen::MatrixXd kss =
      gram(p, s_m, s_m) + jitter * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd lambda = kss;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (const auto &s : c.series()) {
    const Eigen::MatrixXd kst = gram(p, s_m, s.timestamps());
    lambda += kst * kst.transpose() / (sigma * sigma * batch);
    b += kst * s.values() / batch;
  }
  const Eigen::MatrixXd big_sigma = lambda.inverse();
  return {kss * big_sigma * b / (sigma * sigma), kss * big_sigma * kss};
}

/// Predictive mean and full covariance at `query` from explicit inverses.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd>
predict(const DensePosterior &post, const KernelParams &p,
        const Eigen::VectorXd &s_m, const Eigen::VectorXd &query,
        double jitter) {
  const auto m = s_m.size();
  const Eigen::MatrixXd kss_inv =
      (gram(p, s_m, s_m) + jitter * Eigen::MatrixXd::Identity(m, m)).inverse();
  const Eigen::MatrixXd kts = gram(p, query, s_m);
  const Eigen::VectorXd mean = kts * kss_inv * post.mean;
  const Eigen::MatrixXd cov = gram(p, query, query) -
                              kts * kss_inv * kts.transpose() +
                              kts * kss_inv * post.covariance * kss_inv *
                                  kts.transpose();
  return {mean, cov};
}

/// Central finite difference of f along each coordinate of x.
inline Eigen::VectorXd finite_difference(
    const std::function<double(const Eigen::VectorXd &)> &f,
    const Eigen::VectorXd &x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

} // namespace motion_code::reference

#endif
