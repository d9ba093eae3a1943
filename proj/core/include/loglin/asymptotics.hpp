#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "loglin/glasso.hpp"
#include "loglin/model.hpp"

namespace loglin {

/// Gradient of the penalty at a fully-active parameter: block h is
/// lambda_h * theta_h / ||theta_h||_2.
BlockedVector eta0(const BlockedVector& theta0, const std::vector<double>& block_weights);

/// Hessian of the penalty at a fully-active parameter: block-diagonal with
/// h-block lambda_h / ||theta_h|| * (I - u u^T), u the unit block direction.
Eigen::MatrixXd j0_matrix(const BlockedVector& theta0, const std::vector<double>& block_weights);

struct CltStatistic {
  Eigen::VectorXd x;            // the standardized statistic
  Eigen::MatrixXd j0;           // penalty Hessian at theta0
  BlockedVector eta0;           // penalty gradient at theta0
  Eigen::MatrixXd f_inv_sqrt;   // F^{-1/2}
};

/// sqrt(N) F^{-1/2} ((F + lambda J0)(theta_hat - theta0) + lambda eta0),
/// with F the Fisher information of the restricted design at pi0.
CltStatistic clt_statistic(const BlockedVector& theta_hat, const BlockedVector& theta0,
                           const Design& design_h, const Eigen::VectorXd& pi0, double N,
                           double lambda, const std::vector<double>& block_weights);

/// Leakage norms from the zero blocks into the active blocks, per zero block
/// plus the aggregated whole-matrix norm, against the bound (1-eps)/|Hc|.
struct Msc2Report {
  std::vector<double> per_block_norms;  // one per w in Hc, canonical order
  double w_matrix_norm = 0.0;
  double bound = 0.0;  // (1-eps)/|Hc|
  bool applicable = false;  // false when Hc is empty (saturated class)
};

Msc2Report msc2_norms(const Design& saturated, const Eigen::VectorXd& pi0,
                      const InteractionClass& cls, double N, double eps);

/// Per-active-block near-block-diagonality norms against (1-eps)/|H|.
struct AddendumReport {
  std::vector<double> per_block_norms;  // one per h in H, canonical order
  double bound = 0.0;
};

AddendumReport addendum_norms(const Design& design_h, const Eigen::VectorXd& pi0, double eps);

/// Scalar diagnostics for the rate and irreducibility conditions. The o()/O()
/// conditions are rates and cannot be judged at a single n; the ratios are
/// reported so trends can be tracked along an n-ladder.
struct ConditionReport {
  long d_h = 0;
  double N = 0.0;
  double d_h_over_n = 0.0;
  double l_min = 0.0;
  double l_max = 0.0;
  double eigen_ratio = 0.0;  // sqrt(l_max)/l_min
  double alpha = 0.0;        // min active block norm
  double msc1 = 0.0;         // (sqrt(d_h/N) + lambda sqrt(sum lambda_h^2)) / alpha
  std::optional<double> msc2_max;   // absent when Hc empty
  std::optional<double> msc2_bound;
  std::optional<double> msc3;       // |H| max lambda_h / (|Hc| min lambda_w)
  std::optional<double> msc4_max;   // max_w sqrt(d_w)/(sqrt(N) lambda lambda_w)
  double clt_ratio_sqrt = 0.0;      // d_h / sqrt(N)
  double clt_ratio_be = 0.0;        // d_h^{7/2} / N
  double clt_ratio_lf = 0.0;        // d_h^3 / N
};

ConditionReport condition_report(const Design& saturated, const Eigen::VectorXd& pi0,
                                 const BlockedVector& theta0, const InteractionClass& cls,
                                 double N, const PenaltyConfig& penalty, double eps = 0.1);

}  // namespace loglin
