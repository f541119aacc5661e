#ifndef MOTION_CODE_OBJECTIVE_HPP
#define MOTION_CODE_OBJECTIVE_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "motion_code/core.hpp"
#include "motion_code/error.hpp"
#include "motion_code/kernel.hpp"
#include "motion_code/parallel.hpp"

namespace motion_code {

/// sigmoid(theta * z), clamped so every entry is strictly inside (0, 1) even
/// when the logistic saturates in double precision.
inline Eigen::VectorXd informative_timestamps(const Eigen::MatrixXd &theta,
                                              const Eigen::VectorXd &z) {
  if (theta.cols() != z.size()) {
    throw ValidationError("informative_timestamps: theta has " +
                          std::to_string(theta.cols()) + " columns but z has " +
                          std::to_string(z.size()) + " entries");
  }
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  const Eigen::VectorXd x = theta * z;
  Eigen::VectorXd s(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s[i] = std::clamp(sigmoid(x[i]), lo, hi);
  }
  return s;
}

// Exact logistic derivative, accurate where s * (1 - s) would round to zero.
inline double sigmoid_derivative(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

/// Cached per-series quantities for one collection at one inducing set.
/// With L the Cholesky factor of K_SS (+ jitter), U = K_TS L^{-T} so that
/// Q_TT = U U^T, and W = I + U^T U / c with c = B sigma^2 is the m x m
/// capacitance matrix of the Woodbury identity.
struct SeriesBlock {
  Eigen::MatrixXd k_ts; // |T_i| x m
  Eigen::MatrixXd u;    // |T_i| x m
  Eigen::LLT<Eigen::MatrixXd> capacitance;
  double log_density = 0.0;
  double trace = 0.0;
};

struct BoundWorkspace {
  CholeskyFactor k_ss;
  std::vector<SeriesBlock> blocks;
  double noise = 0.0; // c = B sigma^2
  double trace_weight = 0.0; // 1 / (2 sigma^2 B)
  double log_density = 0.0;
  double trace = 0.0;
  double bound = 0.0;
};

inline BoundWorkspace build_bound_workspace(const Collection &collection,
                                            const KernelParams &kparams,
                                            const Eigen::VectorXd &s_m,
                                            double sigma, double jitter) {
  if (s_m.size() < 1) {
    throw ValidationError("lmax_bound: empty inducing set");
  }
  if (!(sigma > 0.0)) {
    throw ValidationError("lmax_bound: sigma must be positive");
  }
  const auto m = s_m.size();
  const double batch = static_cast<double>(collection.size());

  BoundWorkspace ws;
  ws.k_ss = chol_jittered(kernel_matrix(kparams, s_m, s_m), jitter);
  ws.noise = batch * sigma * sigma;
  ws.trace_weight = 1.0 / (2.0 * sigma * sigma * batch);
  const double c = ws.noise;
  const double prior_var = kparams.variance();
  const double log_2pi = std::log(2.0 * std::numbers::pi);

  ws.blocks.reserve(collection.size());
  for (std::size_t i = 0; i < collection.size(); ++i) {
    const TimeSeries &series = collection.series()[i];
    const Eigen::VectorXd &y = series.values();
    const auto n = series.size();

    SeriesBlock blk;
    blk.k_ts = kernel_matrix(kparams, series.timestamps(), s_m);
    blk.u = ws.k_ss.solve_lower(blk.k_ts.transpose()).transpose();
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m);
    w.noalias() += blk.u.transpose() * blk.u / c;
    blk.capacitance.compute(w);
    if (blk.capacitance.info() != Eigen::Success) {
      throw NumericalError("lmax_bound: capacitance factorization failed for "
                           "series " + std::to_string(i));
    }
    const Eigen::MatrixXd r = blk.capacitance.matrixL();
    const double logdet =
        static_cast<double>(n) * std::log(c) +
        2.0 * r.diagonal().array().log().sum();
    const Eigen::VectorXd v =
        blk.capacitance.matrixL().solve(blk.u.transpose() * y);
    const double quad = (y.squaredNorm() - v.squaredNorm() / c) / c;
    blk.log_density =
        -0.5 * (static_cast<double>(n) * log_2pi + logdet + quad);

    double tr = static_cast<double>(n) * prior_var - blk.u.squaredNorm();
    if (tr < 0.0) {
      if (tr < -1e-8) {
        std::ostringstream msg;
        msg << "lmax_bound: negative Nystrom residual trace " << tr
            << " for series " << i;
        throw NumericalError(msg.str());
      }
      tr = 0.0;
    }
    blk.trace = tr;

    if (!std::isfinite(blk.log_density)) {
      throw NumericalError("lmax_bound: non-finite log density for series " +
                           std::to_string(i) + " of class " +
                           std::to_string(collection.label()));
    }
    ws.log_density += blk.log_density;
    ws.trace += blk.trace;
    ws.blocks.push_back(std::move(blk));
  }
  ws.bound = ws.log_density - ws.trace_weight * ws.trace;
  if (!std::isfinite(ws.bound)) {
    throw NumericalError("lmax_bound: non-finite bound for class " +
                         std::to_string(collection.label()));
  }
  return ws;
}

/// Approximate L^max of one collection at inducing timestamps s_m:
///   log N(Y | 0, B sigma^2 I + Q) - 1/(2 sigma^2 B) sum_i Tr(K_ii - Q_ii)
/// evaluated block by block in O(m^2 |T_i|) per series.
inline double lmax_bound(const Collection &collection,
                         const KernelParams &kparams,
                         const Eigen::VectorXd &s_m, double sigma,
                         double jitter) {
  return build_bound_workspace(collection, kparams, s_m, sigma, jitter).bound;
}

struct BoundGradient {
  double value = 0.0;
  Eigen::VectorXd d_log_amplitudes;
  Eigen::VectorXd d_log_bandwidths;
  Eigen::VectorXd d_inducing;
};

/// Gradient of lmax_bound with respect to the kernel log-parameters and the
/// inducing timestamps.
inline BoundGradient lmax_bound_gradient(const Collection &collection,
                                         const KernelParams &kparams,
                                         const Eigen::VectorXd &s_m,
                                         double sigma, double jitter) {
  const BoundWorkspace ws =
      build_bound_workspace(collection, kparams, s_m, sigma, jitter);
  const auto m = s_m.size();
  const double c = ws.noise;
  const double gamma = ws.trace_weight;

  BoundGradient g;
  g.value = ws.bound;
  g.d_log_amplitudes = Eigen::VectorXd::Zero(kparams.components());
  g.d_log_bandwidths = Eigen::VectorXd::Zero(kparams.components());
  g.d_inducing = Eigen::VectorXd::Zero(m);

  // Writing the bound as f(Q_1..Q_B) with dQ weights
  //   G_i = 0.5 (a a^T - C^{-1}) + gamma I,  a = C^{-1} y,
  // we only ever need G_i U_i, which the Woodbury form gives in O(n m^2).
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  Eigen::Index total_points = 0;
  for (std::size_t i = 0; i < ws.blocks.size(); ++i) {
    const SeriesBlock &blk = ws.blocks[i];
    const TimeSeries &series = collection.series()[i];
    const Eigen::VectorXd &y = series.values();
    total_points += series.size();

    const Eigen::VectorXd uty = blk.u.transpose() * y;
    const Eigen::VectorXd beta = blk.capacitance.solve(uty);
    const Eigen::VectorXd a = (y - blk.u * beta / c) / c;
    const Eigen::VectorXd uta = blk.u.transpose() * a;
    // C^{-1} U = U W^{-1} / c
    const Eigen::MatrixXd cinv_u =
        blk.capacitance.solve(blk.u.transpose()).transpose() / c;
    const Eigen::MatrixXd gu =
        0.5 * a * uta.transpose() - 0.5 * cinv_u + gamma * blk.u;

    h.noalias() += blk.u.transpose() * gu;
    // df/dK_TS = 2 G U L^{-1}
    const Eigen::MatrixXd d_kts =
        2.0 * ws.k_ss.solve_upper(gu.transpose()).transpose();
    const KernelContraction kc =
        contract_kernel_gradient(kparams, series.timestamps(), s_m, d_kts);
    g.d_log_amplitudes += kc.d_log_amplitudes;
    g.d_log_bandwidths += kc.d_log_bandwidths;
    g.d_inducing += kc.d_cols;
  }

  // df/dK_SS = -L^{-T} H L^{-1}
  const Eigen::MatrixXd left = ws.k_ss.solve_upper(h);
  Eigen::MatrixXd d_kss = -ws.k_ss.solve_upper(left.transpose()).transpose();
  d_kss = 0.5 * (d_kss + d_kss.transpose()).eval();
  const KernelContraction kc = contract_kernel_gradient(kparams, s_m, s_m, d_kss);
  g.d_log_amplitudes += kc.d_log_amplitudes;
  g.d_log_bandwidths += kc.d_log_bandwidths;
  // s_a enters both as a row and as a column of the symmetric K_SS.
  g.d_inducing += 2.0 * kc.d_cols;

  // Diagonal of K_TT inside the trace term: dK(t,t)/dlog alpha_j = alpha_j.
  g.d_log_amplitudes -=
      gamma * static_cast<double>(total_points) * kparams.amplitudes();
  return g;
}

struct LossGradient {
  double loss = 0.0;
  std::vector<Eigen::VectorXd> d_log_amplitudes;
  std::vector<Eigen::VectorXd> d_log_bandwidths;
  std::vector<Eigen::VectorXd> d_z;
  Eigen::MatrixXd d_theta;
};

namespace detail {

inline void check_consistent(std::span<const Collection> collections,
                             const ModelParams &params) {
  if (collections.size() != params.num_classes()) {
    throw ValidationError("model has " + std::to_string(params.num_classes()) +
                          " classes but the data has " +
                          std::to_string(collections.size()));
  }
}

} // namespace detail

inline double total_loss(std::span<const Collection> collections,
                         const ModelParams &params, int threads = 1) {
  detail::check_consistent(collections, params);
  const auto &hp = params.hyper;
  std::vector<double> bounds(collections.size(), 0.0);
  parallel_for(collections.size(), threads, [&](std::size_t k) {
    const Eigen::VectorXd s = informative_timestamps(params.theta, params.z[k]);
    bounds[k] = lmax_bound(collections[k], params.eta[k], s, hp.sigma, hp.jitter);
  });
  double loss = 0.0;
  for (std::size_t k = 0; k < collections.size(); ++k) {
    loss += -bounds[k] + hp.lambda * params.z[k].squaredNorm();
  }
  return loss;
}

inline double total_loss(const Dataset &dataset, const ModelParams &params,
                         int threads = 1) {
  return total_loss(std::span<const Collection>(dataset.collections()), params,
                    threads);
}

inline LossGradient loss_gradient(std::span<const Collection> collections,
                                  const ModelParams &params, int threads = 1) {
  detail::check_consistent(collections, params);
  const auto &hp = params.hyper;
  const std::size_t L = collections.size();
  std::vector<BoundGradient> per_class(L);
  std::vector<Eigen::VectorXd> pre(L);
  parallel_for(L, threads, [&](std::size_t k) {
    pre[k] = params.theta * params.z[k];
    const Eigen::VectorXd s = informative_timestamps(params.theta, params.z[k]);
    per_class[k] =
        lmax_bound_gradient(collections[k], params.eta[k], s, hp.sigma, hp.jitter);
  });

  LossGradient out;
  out.d_theta = Eigen::MatrixXd::Zero(params.theta.rows(), params.theta.cols());
  for (std::size_t k = 0; k < L; ++k) {
    const BoundGradient &bg = per_class[k];
    out.loss += -bg.value + hp.lambda * params.z[k].squaredNorm();
    out.d_log_amplitudes.push_back(-bg.d_log_amplitudes);
    out.d_log_bandwidths.push_back(-bg.d_log_bandwidths);
    // dU/d(theta z_k) = -dbound/ds * sigmoid'(theta z_k)
    Eigen::VectorXd d_pre(pre[k].size());
    for (Eigen::Index i = 0; i < d_pre.size(); ++i) {
      d_pre[i] = -bg.d_inducing[i] * sigmoid_derivative(pre[k][i]);
    }
    out.d_z.push_back(params.theta.transpose() * d_pre +
                      2.0 * hp.lambda * params.z[k]);
    out.d_theta.noalias() += d_pre * params.z[k].transpose();
  }

  for (std::size_t k = 0; k < L; ++k) {
    if (!out.d_log_amplitudes[k].allFinite() ||
        !out.d_log_bandwidths[k].allFinite()) {
      throw NumericalError("loss_gradient: non-finite kernel gradient for class " +
                           std::to_string(k));
    }
    if (!out.d_z[k].allFinite()) {
      throw NumericalError("loss_gradient: non-finite motion code gradient "
                           "for class " + std::to_string(k));
    }
  }
  if (!out.d_theta.allFinite()) {
    throw NumericalError("loss_gradient: non-finite theta gradient");
  }
  return out;
}

inline LossGradient loss_gradient(const Dataset &dataset,
                                  const ModelParams &params, int threads = 1) {
  return loss_gradient(std::span<const Collection>(dataset.collections()), params,
                       threads);
}

// Flat layout: log-eta class-major (J log-amplitudes then J log-bandwidths),
// then z class-major, then theta row-major.

inline Eigen::Index flat_size(const ModelParams &p) {
  const auto L = static_cast<Eigen::Index>(p.num_classes());
  return L * 2 * p.hyper.J + L * p.hyper.d + p.theta.size();
}

inline Eigen::VectorXd pack_params(const ModelParams &p) {
  Eigen::VectorXd x(flat_size(p));
  Eigen::Index o = 0;
  const Eigen::Index J = p.hyper.J;
  for (const auto &eta : p.eta) {
    x.segment(o, J) = eta.log_amplitudes;
    x.segment(o + J, J) = eta.log_bandwidths;
    o += 2 * J;
  }
  for (const auto &z : p.z) {
    x.segment(o, z.size()) = z;
    o += z.size();
  }
  for (Eigen::Index r = 0; r < p.theta.rows(); ++r) {
    x.segment(o, p.theta.cols()) = p.theta.row(r).transpose();
    o += p.theta.cols();
  }
  return x;
}

/// Inverse of pack_params; `shape` supplies the dimensions and the
/// non-optimized fields (hyperparameters and normalization).
inline ModelParams unpack_params(const Eigen::VectorXd &x,
                                 const ModelParams &shape) {
  if (x.size() != flat_size(shape)) {
    throw ValidationError("unpack_params: flat vector has wrong length");
  }
  ModelParams p = shape;
  Eigen::Index o = 0;
  const Eigen::Index J = shape.hyper.J;
  for (auto &eta : p.eta) {
    eta.log_amplitudes = x.segment(o, J);
    eta.log_bandwidths = x.segment(o + J, J);
    o += 2 * J;
  }
  for (auto &z : p.z) {
    z = x.segment(o, z.size());
    o += z.size();
  }
  for (Eigen::Index r = 0; r < p.theta.rows(); ++r) {
    p.theta.row(r) = x.segment(o, p.theta.cols()).transpose();
    o += p.theta.cols();
  }
  return p;
}

inline Eigen::VectorXd pack_gradient(const LossGradient &g) {
  Eigen::Index n = g.d_theta.size();
  for (std::size_t k = 0; k < g.d_z.size(); ++k) {
    n += g.d_log_amplitudes[k].size() + g.d_log_bandwidths[k].size() +
         g.d_z[k].size();
  }
  Eigen::VectorXd x(n);
  Eigen::Index o = 0;
  for (std::size_t k = 0; k < g.d_z.size(); ++k) {
    const Eigen::Index J = g.d_log_amplitudes[k].size();
    x.segment(o, J) = g.d_log_amplitudes[k];
    x.segment(o + J, J) = g.d_log_bandwidths[k];
    o += 2 * J;
  }
  for (const auto &dz : g.d_z) {
    x.segment(o, dz.size()) = dz;
    o += dz.size();
  }
  for (Eigen::Index r = 0; r < g.d_theta.rows(); ++r) {
    x.segment(o, g.d_theta.cols()) = g.d_theta.row(r).transpose();
    o += g.d_theta.cols();
  }
  return x;
}

} // namespace motion_code

#endif
