#pragma once

#include <Eigen/Dense>
#include <vector>

#include "loglin/model.hpp"

namespace loglin {

/// Penalty lambda * sum_h lambda_h ||theta_h||_2. The default block weights
/// are lambda_h = sqrt(d_h), penalizing blocks proportionally to dimension.
struct PenaltyConfig {
  enum class WeightRule { kSqrtDim, kUnit, kExplicit };

  double lambda = 0.0;
  WeightRule rule = WeightRule::kSqrtDim;
  std::vector<double> explicit_weights;  // aligned with the design blocks

  std::vector<double> block_weights(const Design& design) const;
};

struct SolverConfig {
  int max_iter = 50000;
  double kkt_tol = 1e-7;
  double backtrack = 0.5;
  double init_step = 1.0;
  bool accelerate = true;
};

/// Per-block optimality measures from the subgradient conditions: for active
/// blocks the stationarity residual, for zero blocks the slack
/// max(0, (1/N)||U_h^T (n - m)||_2 - lambda*lambda_h).
struct KktReport {
  std::vector<double> residuals;
  double worst = 0.0;

  bool pass(double tol) const { return worst <= tol; }
};

struct FitResult {
  BlockedVector theta;
  CellDistribution mhat;
  std::vector<bool> active_mask;       // aligned with design blocks
  InteractionClass active;             // nonzero blocks
  SimplicialComplex selected;          // maximal elements of the active set
  bool active_hierarchical = true;     // false flags a non-downward-closed active set
  KktReport kkt;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// (1/N) l(theta) - lambda sum_h lambda_h ||theta_h||_2, constant-free.
double objective(const Design& design, const BlockedVector& theta, const ContingencyTable& table,
                 const PenaltyConfig& penalty);

/// Block soft threshold: 0 if ||v|| <= t, else (1 - t/||v||) v.
Eigen::VectorXd group_prox(const Eigen::VectorXd& v, double threshold);

/// Smallest lambda at which theta = 0 satisfies the zero-block subgradient
/// condition (evaluated against the uniform fitted means).
double null_screening_lambda(const Design& design, const ContingencyTable& table,
                             const PenaltyConfig& penalty);

KktReport kkt_report(const Design& design, const BlockedVector& theta,
                     const ContingencyTable& table, const PenaltyConfig& penalty);

/// Proximal-gradient maximizer of the penalized program on the given design
/// (normally saturated). Requires lambda > 0; lambda = 0 belongs to fit_mle.
FitResult fit(const Design& design, const ContingencyTable& table, const PenaltyConfig& penalty,
              const SolverConfig& config = {}, const BlockedVector* warm_start = nullptr);

SimplicialComplex select_model(const FitResult& result);

/// Per-active-block check of the identity
/// <theta_h, U_h^T (n - m)> = N * lambda * lambda_h * ||theta_h||_2.
struct SmoothedMleReport {
  std::vector<double> relative_violations;  // one per active block
  double max_relative_violation = 0.0;
};

SmoothedMleReport smoothed_mle_check(const FitResult& result, const Design& design,
                                     const ContingencyTable& table, const PenaltyConfig& penalty);

/// Warm-started fits along a descending lambda grid.
std::vector<FitResult> lambda_path(const Design& design, const ContingencyTable& table,
                                   const PenaltyConfig& penalty_rule,
                                   const std::vector<double>& grid,
                                   const SolverConfig& config = {});

}  // namespace loglin
