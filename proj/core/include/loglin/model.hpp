#pragma once

#include <Eigen/Dense>
#include <random>

#include "loglin/design.hpp"

namespace loglin {

/// Observed cell counts in TableShape linear order.
struct ContingencyTable {
  TableShape shape;
  Eigen::VectorXd counts;  // integer-valued, >= 0

  double total() const { return counts.sum(); }
};

ContingencyTable make_table(TableShape shape, Eigen::VectorXd counts);

/// Strictly positive cell probabilities plus the implied means m = N*pi.
struct CellDistribution {
  Eigen::VectorXd pi;
  double N = 0.0;

  Eigen::VectorXd means() const { return N * pi; }
};

CellDistribution make_distribution(Eigen::VectorXd pi, double N);

/// F_H = U^T (D_pi - pi pi^T) U together with its extreme eigenvalues.
struct FisherInfo {
  Eigen::MatrixXd matrix;
  double l_min = 0.0;
  double l_max = 0.0;
};

/// pi = softmax(U theta), m = N*pi. Stabilized by subtracting max(U theta).
CellDistribution mean_map(const Design& design, const BlockedVector& theta, double N);

/// <U^T n, theta> - N log sum exp(U theta). The data-only constant
/// log N! - sum log n_i! is omitted throughout.
double log_likelihood(const Design& design, const BlockedVector& theta,
                      const ContingencyTable& table);

/// Block h equals U_h^T (n - m).
BlockedVector gradient(const Design& design, const BlockedVector& theta,
                       const ContingencyTable& table);

/// -U^T (D_m - m m^T / N) U, i.e. minus the sufficient-statistic covariance.
Eigen::MatrixXd hessian(const Design& design, const BlockedVector& theta, double N);

FisherInfo fisher_info(const Design& design, const Eigen::VectorXd& pi);

/// Multinomial(N, pi) draw, deterministic given the generator state.
ContingencyTable sample_table(const TableShape& shape, const CellDistribution& dist, long N,
                              std::mt19937_64& rng);

struct MleConfig {
  double tol = 1e-10;           // on ||gradient||_inf / N
  int max_iter = 500;
  double divergence_bound = 30.0;  // on ||theta||_inf
  double boundary_pi = 1e-8;       // fitted-probability floor: below it the
                                   // optimum is on the boundary (no MLE)
  int max_halvings = 50;
};

/// MLE nonexistence (likelihood maximized only on the boundary) shows up as
/// iterates escaping to infinity; it is reported through `diverged`, with the
/// last iterate kept for diagnostics.
struct MleResult {
  BlockedVector theta;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double grad_inf_norm = 0.0;
};

MleResult fit_mle(const Design& design, const ContingencyTable& table, const MleConfig& config = {});

}  // namespace loglin
