#ifndef MOTION_CODE_KERNEL_HPP
#define MOTION_CODE_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "motion_code/error.hpp"

namespace motion_code {

/// Parameters of the spectral kernel
///   K(t, s) = sum_j alpha_j * exp(-0.5 * beta_j * (t - s)^2)
/// stored in log space so that alpha_j = exp(log_amplitudes[j]) and
/// beta_j = exp(log_bandwidths[j]) stay positive under unconstrained updates.
struct KernelParams {
  Eigen::VectorXd log_amplitudes;
  Eigen::VectorXd log_bandwidths;

  KernelParams() = default;
  KernelParams(Eigen::VectorXd log_amp, Eigen::VectorXd log_bw)
      : log_amplitudes(std::move(log_amp)), log_bandwidths(std::move(log_bw)) {
    validate();
  }

  static KernelParams unit(Eigen::Index components) {
    return {Eigen::VectorXd::Zero(components), Eigen::VectorXd::Zero(components)};
  }

  static KernelParams from_natural(const Eigen::VectorXd &amplitudes,
                                   const Eigen::VectorXd &bandwidths) {
    return {amplitudes.array().log().matrix(), bandwidths.array().log().matrix()};
  }

  Eigen::Index components() const { return log_amplitudes.size(); }
  Eigen::VectorXd amplitudes() const { return log_amplitudes.array().exp(); }
  Eigen::VectorXd bandwidths() const { return log_bandwidths.array().exp(); }

  /// Kernel value at zero lag, i.e. the diagonal of every kernel matrix.
  double variance() const { return amplitudes().sum(); }

  void validate() const {
    if (log_amplitudes.size() < 1 ||
        log_amplitudes.size() != log_bandwidths.size()) {
      throw ValidationError("kernel parameters need J >= 1 amplitudes and "
                            "the same number of bandwidths");
    }
    for (Eigen::Index j = 0; j < components(); ++j) {
      const double a = std::exp(log_amplitudes[j]);
      const double b = std::exp(log_bandwidths[j]);
      if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
        throw ValidationError("kernel log-parameters must exponentiate to "
                              "finite positive values");
      }
    }
  }
};

inline double kernel_eval(const KernelParams &params, double t, double s) {
  if (!std::isfinite(t) || !std::isfinite(s)) {
    throw DomainError("kernel_eval: non-finite timestamp");
  }
  const double r2 = (t - s) * (t - s);
  double value = 0.0;
  for (Eigen::Index j = 0; j < params.components(); ++j) {
    value += std::exp(params.log_amplitudes[j]) *
             std::exp(-0.5 * std::exp(params.log_bandwidths[j]) * r2);
  }
  return value;
}

inline Eigen::MatrixXd kernel_matrix(const KernelParams &params,
                                     const Eigen::VectorXd &rows,
                                     const Eigen::VectorXd &cols) {
  if (rows.size() == 0 || cols.size() == 0) {
    throw ValidationError("kernel_matrix: empty timestamp list");
  }
  if (!rows.allFinite() || !cols.allFinite()) {
    throw DomainError("kernel_matrix: non-finite timestamp");
  }
  const Eigen::ArrayXd alpha = params.amplitudes().array();
  const Eigen::ArrayXd beta = params.bandwidths().array();
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (Eigen::Index b = 0; b < cols.size(); ++b) {
    for (Eigen::Index a = 0; a < rows.size(); ++a) {
      const double r = rows[a] - cols[b];
      out(a, b) = (alpha * (-0.5 * beta * r * r).exp()).sum();
    }
  }
  return out;
}

/// Partial derivatives of one kernel entry K(t, s).
struct KernelEntryGradient {
  Eigen::ArrayXd d_log_amplitude; // dK / d log alpha_j
  Eigen::ArrayXd d_log_bandwidth; // dK / d log beta_j
  double d_s = 0.0;               // dK / ds
};

/// Accumulates sum_{a,b} weights(a,b) * dK(rows[a], cols[b]) / d(log params)
/// and, per column b, sum_a weights(a,b) * dK(rows[a], cols[b]) / d cols[b].
/// This is the chain-rule contraction used by the objective gradient; the
/// full derivative tensors are never formed.
struct KernelContraction {
  Eigen::VectorXd d_log_amplitudes;
  Eigen::VectorXd d_log_bandwidths;
  Eigen::VectorXd d_cols;
};

inline KernelContraction contract_kernel_gradient(const KernelParams &params,
                                                  const Eigen::VectorXd &rows,
                                                  const Eigen::VectorXd &cols,
                                                  const Eigen::MatrixXd &weights) {
  const Eigen::Index J = params.components();
  const Eigen::ArrayXd alpha = params.amplitudes().array();
  const Eigen::ArrayXd beta = params.bandwidths().array();
  KernelContraction out{Eigen::VectorXd::Zero(J), Eigen::VectorXd::Zero(J),
                        Eigen::VectorXd::Zero(cols.size())};
  Eigen::ArrayXd comp(J);
  for (Eigen::Index b = 0; b < cols.size(); ++b) {
    double d_col = 0.0;
    for (Eigen::Index a = 0; a < rows.size(); ++a) {
      const double w = weights(a, b);
      if (w == 0.0) {
        continue;
      }
      const double r = rows[a] - cols[b];
      const double r2 = r * r;
      comp = alpha * (-0.5 * beta * r2).exp();
      out.d_log_amplitudes.array() += w * comp;
      out.d_log_bandwidths.array() += w * (-0.5 * r2) * beta * comp;
      // d/ds exp(-0.5 beta (t - s)^2) = beta (t - s) exp(...)
      d_col += w * r * (beta * comp).sum();
    }
    out.d_cols[b] = d_col;
  }
  return out;
}

inline KernelEntryGradient kernel_entry_gradient(const KernelParams &params,
                                                 double t, double s) {
  const Eigen::ArrayXd alpha = params.amplitudes().array();
  const Eigen::ArrayXd beta = params.bandwidths().array();
  const double r = t - s;
  const Eigen::ArrayXd comp = alpha * (-0.5 * beta * r * r).exp();
  return {comp, -0.5 * r * r * beta * comp, r * (beta * comp).sum()};
}

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter_used = 0.0;

  Eigen::Index size() const { return lower.rows(); }

  double log_determinant() const {
    return 2.0 * lower.diagonal().array().log().sum();
  }

  /// Solves (L L^T) X = rhs.
  template <typename Rhs> Eigen::MatrixXd solve(const Rhs &rhs) const {
    auto tri = lower.triangularView<Eigen::Lower>();
    Eigen::MatrixXd x = tri.solve(rhs);
    return tri.transpose().solve(x);
  }

  /// Solves L X = rhs.
  template <typename Rhs> Eigen::MatrixXd solve_lower(const Rhs &rhs) const {
    return lower.triangularView<Eigen::Lower>().solve(rhs);
  }

  /// Solves L^T X = rhs.
  template <typename Rhs> Eigen::MatrixXd solve_upper(const Rhs &rhs) const {
    return lower.triangularView<Eigen::Lower>().transpose().solve(rhs);
  }

  Eigen::MatrixXd reconstruct() const { return lower * lower.transpose(); }
};

constexpr double kDefaultJitter = 1e-6;
constexpr int kJitterDecades = 6;

/// Cholesky factor of mat + j I for the smallest j in
/// {base_jitter * 10^p : p = 0..6} that yields a positive-definite matrix.
inline CholeskyFactor chol_jittered(const Eigen::MatrixXd &mat,
                                    double base_jitter = kDefaultJitter) {
  if (mat.rows() != mat.cols() || mat.rows() == 0) {
    throw ValidationError("chol_jittered: matrix must be square and non-empty");
  }
  if (!(base_jitter > 0.0)) {
    throw ValidationError("chol_jittered: base jitter must be positive");
  }
  if (!mat.allFinite()) {
    throw SingularityError("chol_jittered: matrix has non-finite entries",
                           std::numeric_limits<double>::quiet_NaN());
  }
  const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
  if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("chol_jittered: matrix is not symmetric");
  }
  const auto n = mat.rows();
  for (int p = 0; p <= kJitterDecades; ++p) {
    const double jitter = base_jitter * std::pow(10.0, p);
    Eigen::LLT<Eigen::MatrixXd> llt(mat +
                                    jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) {
      continue;
    }
    Eigen::MatrixXd lower = llt.matrixL();
    if ((lower.diagonal().array() > 0.0).all() && lower.allFinite()) {
      return {std::move(lower), jitter};
    }
  }
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  std::ostringstream msg;
  msg << "chol_jittered: matrix is not positive definite at any jitter up to "
      << base_jitter * 1e6 << " (minimum eigenvalue " << min_eig << ")";
  throw SingularityError(msg.str(), min_eig);
}

} // namespace motion_code

#endif
