#ifndef MOTION_CODE_OPTIMIZER_HPP
#define MOTION_CODE_OPTIMIZER_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "motion_code/core.hpp"
#include "motion_code/error.hpp"
#include "motion_code/objective.hpp"

namespace motion_code {

enum class StopReason { max_iters, small_decrease, small_gradient, line_search_failure };

inline std::string_view to_string(StopReason r) {
  switch (r) {
  case StopReason::max_iters:
    return "max-iters";
  case StopReason::small_decrease:
    return "small-decrease";
  case StopReason::small_gradient:
    return "small-gradient";
  case StopReason::line_search_failure:
    return "line-search-failure";
  }
  return "unknown";
}

struct LbfgsOptions {
  int history = 10;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double backtrack = 0.5;
  int max_halvings = 30;
  double gradient_tolerance = 1e-10;
  double curvature_floor = 1e-12;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double loss = 0.0;
  int iterations = 0;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<double> loss_history; // loss at x0 and after each accepted step
};

/// Limited-memory curvature pairs (s, y) with a fixed capacity.
class LbfgsHistory {
public:
  explicit LbfgsHistory(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  /// Stores the pair unless it violates the curvature condition s^T y > floor.
  bool push(Eigen::VectorXd s, Eigen::VectorXd y, double floor) {
    if (!(s.dot(y) > floor) || capacity_ == 0) {
      return false;
    }
    if (pairs_.size() == capacity_) {
      pairs_.pop_front();
    }
    pairs_.push_back({std::move(s), std::move(y)});
    return true;
  }

  std::size_t size() const { return pairs_.size(); }

  /// Two-loop recursion: returns -H g for the implicit inverse Hessian H.
  Eigen::VectorXd direction(const Eigen::VectorXd &g) const {
    Eigen::VectorXd q = g;
    std::vector<double> alpha(pairs_.size());
    for (std::size_t i = pairs_.size(); i-- > 0;) {
      const auto &[s, y] = pairs_[i];
      alpha[i] = s.dot(q) / s.dot(y);
      q -= alpha[i] * y;
    }
    if (!pairs_.empty()) {
      const auto &[s, y] = pairs_.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto &[s, y] = pairs_[i];
      const double beta = y.dot(q) / s.dot(y);
      q += (alpha[i] - beta) * s;
    }
    return -q;
  }

private:
  struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
  };
  std::size_t capacity_;
  std::deque<Pair> pairs_;
};

using LossFn = std::function<double(const Eigen::VectorXd &)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

/// L-BFGS with Armijo backtracking. Stops when `max_iters` steps have been
/// accepted, when one step lowers the loss by less than `epsilon` (absolute),
/// or when the gradient max-norm drops below the tolerance. A line search that
/// cannot find a decrease returns the current point without throwing.
inline MinimizeResult minimize(const LossFn &loss_fn, const GradFn &grad_fn,
                               const Eigen::VectorXd &x0, int max_iters,
                               double epsilon, const LbfgsOptions &opt = {}) {
  MinimizeResult res;
  res.x = x0;
  res.loss = loss_fn(x0);
  if (!std::isfinite(res.loss)) {
    throw NumericalError("minimize: loss is not finite at the starting point");
  }
  res.loss_history.push_back(res.loss);
  if (max_iters <= 0) {
    res.stop_reason = StopReason::max_iters;
    return res;
  }

  Eigen::VectorXd g = grad_fn(res.x);
  LbfgsHistory history(opt.history);
  while (true) {
    Eigen::VectorXd d = history.direction(g);
    double slope = g.dot(d);
    if (!(slope < 0.0) && history.size() > 0) {
      // Stale curvature made the direction uphill; restart from steepest descent.
      history = LbfgsHistory(opt.history);
      d = -g;
      slope = g.dot(d);
    }

    double step = opt.initial_step;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      x_new = res.x + step * d;
      f_new = loss_fn(x_new);
      if (std::isfinite(f_new) && f_new <= res.loss + opt.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!accepted) {
      res.stop_reason = StopReason::line_search_failure;
      return res;
    }

    const Eigen::VectorXd g_new = grad_fn(x_new);
    const double decrease = res.loss - f_new;
    if (!history.push(x_new - res.x, g_new - g, opt.curvature_floor)) {
      // Negative curvature along the step: the stored pairs no longer
      // describe the local model, so fall back to steepest descent.
      history = LbfgsHistory(opt.history);
    }
    res.x = std::move(x_new);
    res.loss = f_new;
    g = g_new;
    ++res.iterations;
    res.loss_history.push_back(res.loss);

    if (decrease < epsilon) {
      res.stop_reason = StopReason::small_decrease;
      return res;
    }
    if (g.cwiseAbs().maxCoeff() < opt.gradient_tolerance) {
      res.stop_reason = StopReason::small_gradient;
      return res;
    }
    if (res.iterations >= max_iters) {
      res.stop_reason = StopReason::max_iters;
      return res;
    }
  }
}

/// Starting point: unit kernel parameters, all-ones motion codes and a theta
/// whose every column runs linearly from 0.1 to 0.9.
inline ModelParams init_params(std::size_t num_classes, const Hyperparams &hyper) {
  hyper.validate();
  ModelParams p;
  p.hyper = hyper;
  for (std::size_t k = 0; k < num_classes; ++k) {
    p.eta.push_back(KernelParams::unit(hyper.J));
    p.z.push_back(Eigen::VectorXd::Ones(hyper.d));
  }
  p.theta.resize(hyper.m, hyper.d);
  for (int r = 0; r < hyper.m; ++r) {
    const double v =
        hyper.m == 1 ? 0.5 : 0.1 + 0.8 * static_cast<double>(r) / (hyper.m - 1);
    p.theta.row(r).setConstant(v);
  }
  return p;
}

struct TrainResult {
  ModelParams params;
  MinimizeResult trace;
};

/// Minimizes total_loss from init_params. Trial points whose objective cannot
/// be evaluated (e.g. a kernel matrix that stays singular) count as +inf so
/// the line search backs off instead of aborting.
inline TrainResult train(std::span<const Collection> collections,
                         const Hyperparams &hyper, const TimeScale &time_scale,
                         const ValueScale &value_scale, int threads = 1,
                         const LbfgsOptions &opt = {}) {
  ModelParams shape = init_params(collections.size(), hyper);
  shape.time_scale = time_scale;
  shape.value_scale = value_scale;

  const LossFn loss = [&](const Eigen::VectorXd &x) {
    try {
      return total_loss(collections, unpack_params(x, shape), threads);
    } catch (const NumericalError &) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const GradFn grad = [&](const Eigen::VectorXd &x) {
    return pack_gradient(loss_gradient(collections, unpack_params(x, shape), threads));
  };
  const Eigen::VectorXd x0 = pack_params(shape);
  if (!std::isfinite(loss(x0))) {
    // Re-run unguarded so the caller sees the underlying numerical error.
    total_loss(collections, shape, threads);
  }
  TrainResult out;
  out.trace = minimize(loss, grad, x0, hyper.max_iters, hyper.epsilon, opt);
  out.params = unpack_params(out.trace.x, shape);
  return out;
}

inline TrainResult train(const Dataset &dataset, const Hyperparams &hyper,
                         int threads = 1, const LbfgsOptions &opt = {}) {
  return train(std::span<const Collection>(dataset.collections()), hyper,
               dataset.time_scale(), dataset.value_scale(), threads, opt);
}

} // namespace motion_code

#endif
