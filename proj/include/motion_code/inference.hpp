#ifndef MOTION_CODE_INFERENCE_HPP
#define MOTION_CODE_INFERENCE_HPP

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "motion_code/core.hpp"
#include "motion_code/error.hpp"
#include "motion_code/kernel.hpp"
#include "motion_code/objective.hpp"
#include "motion_code/parallel.hpp"

namespace motion_code {

/// Optimal Gaussian over the signal at the inducing timestamps of one class.
///
/// Lambda = K_SS + sigma^-2 / B * sum_i K_{S T_i} K_{T_i S} is handled in the
/// whitened form L^-1 Lambda L^-T = I + sigma^-2 / B * sum_i V_i V_i^T with
/// V_i = L^-1 K_{S T_i}, which is bounded below by I and therefore always
/// factorizable once K_SS is.
struct VariationalPosterior {
  int label = 0;
  Eigen::VectorXd inducing;
  Eigen::VectorXd mean;       // mu_k
  Eigen::MatrixXd covariance; // A_k
  CholeskyFactor k_ss;
  Eigen::MatrixXd whitened_lambda_lower;
  double sigma = 0.0;
  std::size_t batch = 0;
};

inline VariationalPosterior fit_posterior(const Collection &collection,
                                          const KernelParams &kparams,
                                          const Eigen::VectorXd &s_m,
                                          double sigma, double jitter) {
  for (Eigen::Index a = 0; a < s_m.size(); ++a) {
    if (!(s_m[a] > 0.0 && s_m[a] < 1.0)) {
      throw RangeError("fit_posterior: inducing timestamps must lie in (0, 1)");
    }
  }
  if (!(sigma > 0.0)) {
    throw ValidationError("fit_posterior: sigma must be positive");
  }
  const auto m = s_m.size();
  const double batch = static_cast<double>(collection.size());
  const double precision = 1.0 / (sigma * sigma);

  VariationalPosterior post;
  post.label = collection.label();
  post.inducing = s_m;
  post.sigma = sigma;
  post.batch = collection.size();
  post.k_ss = chol_jittered(kernel_matrix(kparams, s_m, s_m), jitter);

  Eigen::MatrixXd whitened = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd projected = Eigen::VectorXd::Zero(m); // (1/B) sum K_{S T_i} y_i
  for (const TimeSeries &series : collection.series()) {
    const Eigen::MatrixXd k_st = kernel_matrix(kparams, s_m, series.timestamps());
    const Eigen::MatrixXd v = post.k_ss.solve_lower(k_st);
    whitened.noalias() += (precision / batch) * v * v.transpose();
    projected.noalias() += k_st * series.values() / batch;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(whitened);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("fit_posterior: Lambda is not positive definite",
                           std::numeric_limits<double>::quiet_NaN());
  }
  post.whitened_lambda_lower = llt.matrixL();

  // mu = sigma^-2 K_SS Lambda^-1 b = sigma^-2 L Bw^-1 L^-1 b
  const Eigen::VectorXd lb = post.k_ss.solve_lower(projected);
  post.mean = precision * (post.k_ss.lower * llt.solve(lb));
  // A = K_SS Lambda^-1 K_SS = (L R^-T)(L R^-T)^T with Bw = R R^T
  const Eigen::MatrixXd x =
      llt.matrixL().solve(post.k_ss.lower.transpose()).transpose();
  post.covariance = x * x.transpose();
  if (!post.mean.allFinite() || !post.covariance.allFinite()) {
    throw NumericalError("fit_posterior: non-finite posterior for class " +
                         std::to_string(collection.label()));
  }
  return post;
}

/// Predictive mean K_TS K_SS^-1 mu and the diagonal of
/// K_TT - K_TS K_SS^-1 K_ST + K_TS K_SS^-1 A K_SS^-1 K_ST.
inline Prediction predict(const VariationalPosterior &post,
                          const KernelParams &kparams,
                          const Eigen::VectorXd &query) {
  if (query.size() == 0) {
    throw ValidationError("predict: empty query");
  }
  if (!query.allFinite()) {
    throw DomainError("predict: non-finite query timestamp");
  }
  const Eigen::MatrixXd v =
      post.k_ss.solve_lower(kernel_matrix(kparams, post.inducing, query));
  const Eigen::VectorXd w_mean = post.k_ss.solve_lower(post.mean);
  const Eigen::MatrixXd inner =
      post.k_ss.solve_lower(post.k_ss.solve_lower(post.covariance).transpose());

  Prediction out;
  out.timestamps = query;
  out.mean = v.transpose() * w_mean;
  out.variance.resize(query.size());
  const double prior = kparams.variance();
  const double tolerance = 1e-8 * std::max(1.0, prior);
  for (Eigen::Index i = 0; i < query.size(); ++i) {
    const auto col = v.col(i);
    double var = prior - col.squaredNorm() + col.dot(inner * col);
    if (var < 0.0) {
      if (var < -tolerance) {
        throw NumericalError("predict: predictive variance " +
                             std::to_string(var) + " is negative");
      }
      var = 0.0;
    }
    out.variance[i] = var;
  }
  return out;
}

inline void check_model_matches(const ModelParams &model, const Dataset &dataset) {
  if (model.num_classes() != dataset.num_classes()) {
    throw ValidationError("model has " + std::to_string(model.num_classes()) +
                          " classes but the data has " +
                          std::to_string(dataset.num_classes()));
  }
}

inline VariationalPosterior fit_class_posterior(const ModelParams &model,
                                                const Dataset &dataset, int k) {
  const Collection &collection = dataset.collection(k);
  if (k >= static_cast<int>(model.num_classes())) {
    throw LookupError("model has no class " + std::to_string(k));
  }
  const auto kk = static_cast<std::size_t>(k);
  return fit_posterior(collection, model.eta[kk],
                       informative_timestamps(model.theta, model.z[kk]),
                       model.hyper.sigma, model.hyper.jitter);
}

inline std::vector<VariationalPosterior>
fit_all_posteriors(const ModelParams &model, const Dataset &dataset,
                   int threads = 1) {
  check_model_matches(model, dataset);
  std::vector<VariationalPosterior> out(dataset.num_classes());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    out[k] = fit_class_posterior(model, dataset, static_cast<int>(k));
  });
  return out;
}

/// Upper end of the normalized forecasting window.
constexpr double kMaxForecastTime = 1.25;

inline void check_forecast_query(const Eigen::VectorXd &query) {
  for (Eigen::Index i = 0; i < query.size(); ++i) {
    if (!(query[i] >= 0.0 && query[i] <= kMaxForecastTime)) {
      throw RangeError("forecast: query time " + std::to_string(query[i]) +
                       " outside [0, 1.25]");
    }
  }
}

/// One forecast per class: posterior fitted on C_k, predicted at `query`.
inline Prediction forecast(const ModelParams &model, const Dataset &dataset,
                           int k, const Eigen::VectorXd &query) {
  check_model_matches(model, dataset);
  check_forecast_query(query);
  const VariationalPosterior post = fit_class_posterior(model, dataset, k);
  return predict(post, model.eta[static_cast<std::size_t>(k)], query);
}

struct Classification {
  int label = 0;
  Eigen::VectorXd distances;
};

/// Nearest predicted mean signal in Euclidean distance; ties go to the
/// smaller class id.
inline Classification classify(const ModelParams &model,
                               const std::vector<VariationalPosterior> &posteriors,
                               const Eigen::VectorXd &timestamps,
                               const Eigen::VectorXd &values) {
  if (timestamps.size() != values.size() || timestamps.size() == 0) {
    throw ValidationError("classify: timestamps and values must be non-empty "
                          "and of equal length");
  }
  for (Eigen::Index i = 0; i < timestamps.size(); ++i) {
    if (!(timestamps[i] >= 0.0 && timestamps[i] <= 1.0)) {
      throw RangeError("classify: timestamp outside [0, 1]");
    }
  }
  Classification out;
  out.distances.resize(static_cast<Eigen::Index>(posteriors.size()));
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    const Prediction p = predict(posteriors[k], model.eta[k], timestamps);
    out.distances[static_cast<Eigen::Index>(k)] = (values - p.mean).norm();
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < out.distances.size(); ++k) {
    if (out.distances[k] < out.distances[best]) {
      best = k;
    }
  }
  out.label = static_cast<int>(best);
  return out;
}

inline Classification classify(const ModelParams &model, const Dataset &dataset,
                               const TimeSeries &series) {
  return classify(model, fit_all_posteriors(model, dataset), series.timestamps(),
                  series.values());
}

} // namespace motion_code

#endif
