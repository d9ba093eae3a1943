#include "loglin/glasso.hpp"

#include <cmath>
#include <stdexcept>

namespace loglin {

std::vector<double> PenaltyConfig::block_weights(const Design& design) const {
  std::vector<double> w(design.block_count());
  switch (rule) {
    case WeightRule::kSqrtDim:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(double(design.block(i).dim()));
      break;
    case WeightRule::kUnit:
      for (double& wi : w) wi = 1.0;
      break;
    case WeightRule::kExplicit:
      if (explicit_weights.size() != w.size()) {
        throw std::invalid_argument("explicit weights must match the block count");
      }
      for (double wi : explicit_weights) {
        if (wi <= 0.0) throw std::invalid_argument("block weights must be positive");
      }
      w = explicit_weights;
      break;
  }
  return w;
}

double objective(const Design& design, const BlockedVector& theta, const ContingencyTable& table,
                 const PenaltyConfig& penalty) {
  const double N = table.total();
  double value = log_likelihood(design, theta, table) / N;
  const auto weights = penalty.block_weights(design);
  for (std::size_t i = 0; i < theta.blocks.size(); ++i) {
    value -= penalty.lambda * weights[i] * theta.blocks[i].norm();
  }
  return value;
}

Eigen::VectorXd group_prox(const Eigen::VectorXd& v, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prox threshold must be nonnegative");
  const double norm = v.norm();
  if (norm <= threshold) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - threshold / norm) * v;
}

double null_screening_lambda(const Design& design, const ContingencyTable& table,
                             const PenaltyConfig& penalty) {
  const double N = table.total();
  const Eigen::VectorXd uniform_means =
      Eigen::VectorXd::Constant(design.shape().cell_count(), N / design.shape().cell_count());
  const BlockedVector score = design.apply_transpose(table.counts - uniform_means);
  const auto weights = penalty.block_weights(design);
  double bound = 0.0;
  for (std::size_t i = 0; i < score.blocks.size(); ++i) {
    bound = std::max(bound, score.blocks[i].norm() / (N * weights[i]));
  }
  return bound;
}

KktReport kkt_report(const Design& design, const BlockedVector& theta,
                     const ContingencyTable& table, const PenaltyConfig& penalty) {
  const double N = table.total();
  const BlockedVector score = gradient(design, theta, table);  // U^T (n - m)
  const auto weights = penalty.block_weights(design);
  KktReport report;
  report.residuals.resize(theta.blocks.size());
  for (std::size_t i = 0; i < theta.blocks.size(); ++i) {
    const double level = penalty.lambda * weights[i];
    const Eigen::VectorXd scaled = score.blocks[i] / N;
    const double block_norm = theta.blocks[i].norm();
    if (block_norm > 0.0) {
      report.residuals[i] = (scaled - level * theta.blocks[i] / block_norm).norm();
    } else {
      report.residuals[i] = std::max(0.0, scaled.norm() - level);
    }
    report.worst = std::max(report.worst, report.residuals[i]);
  }
  return report;
}

namespace {

InteractionClass active_class(const Design& design, const BlockedVector& theta,
                              std::vector<bool>& mask) {
  std::vector<FactorSet> active;
  mask.assign(design.block_count(), false);
  for (std::size_t i = 0; i < design.block_count(); ++i) {
    // Zero blocks are exact zeros out of the prox; no epsilon threshold.
    if (theta.blocks[i].norm() > 0.0) {
      mask[i] = true;
      active.push_back(design.block(i).subset);
    }
  }
  return InteractionClass(design.shape().K(), std::move(active));
}

}  // namespace

FitResult fit(const Design& design, const ContingencyTable& table, const PenaltyConfig& penalty,
              const SolverConfig& config, const BlockedVector* warm_start) {
  if (penalty.lambda <= 0.0) {
    throw std::invalid_argument("fit requires lambda > 0; use fit_mle for the unpenalized case");
  }
  const double N = table.total();
  if (N <= 0) throw std::invalid_argument("empty table");
  const auto weights = penalty.block_weights(design);

  // Minimize F = f + g with f = -(1/N) l and g the group penalty.
  auto smooth_value = [&](const BlockedVector& th) {
    return -log_likelihood(design, th, table) / N;
  };
  auto smooth_gradient = [&](const BlockedVector& th) {
    BlockedVector g = gradient(design, th, table);
    for (auto& b : g.blocks) b = -b / N;
    return g;
  };
  auto penalty_value = [&](const BlockedVector& th) {
    double p = 0.0;
    for (std::size_t i = 0; i < th.blocks.size(); ++i) {
      p += penalty.lambda * weights[i] * th.blocks[i].norm();
    }
    return p;
  };

  BlockedVector theta = warm_start ? *warm_start : design.zero_vector();
  BlockedVector momentum = theta;  // y point for acceleration
  double t_k = 1.0;                // momentum weight parameter
  double step = config.init_step;

  FitResult result;
  double f_theta = smooth_value(theta);
  double total_theta = f_theta + penalty_value(theta);
  result.objective_trace.push_back(-total_theta);

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    result.iterations = iter;

    const KktReport kkt = kkt_report(design, theta, table, penalty);
    if (kkt.pass(config.kkt_tol)) {
      result.kkt = kkt;
      result.converged = true;
      break;
    }
    if (iter == config.max_iter) {
      result.kkt = kkt;
      break;
    }

    const BlockedVector& y = config.accelerate ? momentum : theta;
    const double f_y = (&y == &theta) ? f_theta : smooth_value(y);
    const BlockedVector grad_y = smooth_gradient(y);

    // Backtracking on the local quadratic model around y.
    BlockedVector candidate = design.zero_vector();
    double f_candidate = 0.0;
    for (;;) {
      double quad = f_y;
      for (std::size_t i = 0; i < candidate.blocks.size(); ++i) {
        const Eigen::VectorXd target = y.blocks[i] - step * grad_y.blocks[i];
        candidate.blocks[i] = group_prox(target, step * penalty.lambda * weights[i]);
        const Eigen::VectorXd diff = candidate.blocks[i] - y.blocks[i];
        quad += grad_y.blocks[i].dot(diff) + diff.squaredNorm() / (2.0 * step);
      }
      f_candidate = smooth_value(candidate);
      if (f_candidate <= quad + 1e-15 * std::abs(quad)) break;
      step *= config.backtrack;
      if (step < 1e-16) break;
    }

    const double total_candidate = f_candidate + penalty_value(candidate);
    if (config.accelerate && total_candidate > total_theta + 1e-12) {
      // Function-value restart: drop momentum and retake the step from theta.
      momentum = theta;
      t_k = 1.0;
      continue;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    if (config.accelerate) {
      momentum = candidate;
      for (std::size_t i = 0; i < momentum.blocks.size(); ++i) {
        momentum.blocks[i] += ((t_k - 1.0) / t_next) * (candidate.blocks[i] - theta.blocks[i]);
      }
    }
    t_k = t_next;
    theta = std::move(candidate);
    f_theta = f_candidate;
    total_theta = total_candidate;
    result.objective_trace.push_back(-total_theta);
  }

  result.theta = theta;
  result.mhat = mean_map(design, theta, N);
  result.active = active_class(design, theta, result.active_mask);
  result.active_hierarchical = result.active.is_downward_closed();
  result.selected = maximal_elements(result.active);
  if (result.kkt.residuals.empty()) {
    result.kkt = kkt_report(design, theta, table, penalty);
  }
  return result;
}

SimplicialComplex select_model(const FitResult& result) {
  return maximal_elements(result.active);
}

SmoothedMleReport smoothed_mle_check(const FitResult& result, const Design& design,
                                     const ContingencyTable& table, const PenaltyConfig& penalty) {
  const double N = table.total();
  const BlockedVector score = design.apply_transpose(table.counts - result.mhat.means());
  const auto weights = penalty.block_weights(design);
  SmoothedMleReport report;
  for (std::size_t i = 0; i < result.theta.blocks.size(); ++i) {
    const double norm = result.theta.blocks[i].norm();
    if (norm == 0.0) continue;  // inactive blocks excluded
    const double lhs = result.theta.blocks[i].dot(score.blocks[i]);
    const double rhs = N * penalty.lambda * weights[i] * norm;
    const double rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    report.relative_violations.push_back(rel);
    report.max_relative_violation = std::max(report.max_relative_violation, rel);
  }
  return report;
}

std::vector<FitResult> lambda_path(const Design& design, const ContingencyTable& table,
                                   const PenaltyConfig& penalty_rule,
                                   const std::vector<double>& grid, const SolverConfig& config) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] >= grid[i - 1]) throw std::invalid_argument("lambda grid must be descending");
  }
  std::vector<FitResult> path;
  path.reserve(grid.size());
  const BlockedVector* warm = nullptr;
  for (double lambda : grid) {
    PenaltyConfig penalty = penalty_rule;
    penalty.lambda = lambda;
    path.push_back(fit(design, table, penalty, config, warm));
    warm = &path.back().theta;
  }
  return path;
}

}  // namespace loglin
