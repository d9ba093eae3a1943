#include "loglin/model.hpp"

#include <cmath>
#include <stdexcept>

namespace loglin {

ContingencyTable make_table(TableShape shape, Eigen::VectorXd counts) {
  if (counts.size() != shape.cell_count()) {
    throw std::invalid_argument("counts length does not match shape");
  }
  for (long i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0 || counts[i] != std::floor(counts[i])) {
      throw std::invalid_argument("counts must be nonnegative integers");
    }
  }
  return ContingencyTable{std::move(shape), std::move(counts)};
}

CellDistribution make_distribution(Eigen::VectorXd pi, double N) {
  if (pi.size() == 0 || pi.minCoeff() <= 0.0) {
    throw std::invalid_argument("cell probabilities must be strictly positive");
  }
  if (std::abs(pi.sum() - 1.0) > 1e-12 * pi.size()) {
    throw std::invalid_argument("cell probabilities must sum to 1");
  }
  if (N < 0) throw std::invalid_argument("N must be nonnegative");
  return CellDistribution{std::move(pi), N};
}

namespace {

// softmax(eta) and log sum exp(eta), max-shifted.
std::pair<Eigen::VectorXd, double> softmax(const Eigen::VectorXd& eta) {
  const double shift = eta.maxCoeff();
  Eigen::VectorXd w = (eta.array() - shift).exp();
  const double total = w.sum();
  return {w / total, shift + std::log(total)};
}

}  // namespace

CellDistribution mean_map(const Design& design, const BlockedVector& theta, double N) {
  const Eigen::VectorXd eta = design.apply(theta);
  if (!eta.allFinite()) throw std::invalid_argument("non-finite natural parameter");
  auto [pi, lse] = softmax(eta);
  (void)lse;
  return CellDistribution{std::move(pi), N};
}

double log_likelihood(const Design& design, const BlockedVector& theta,
                      const ContingencyTable& table) {
  const Eigen::VectorXd eta = design.apply(theta);
  if (!eta.allFinite()) throw std::invalid_argument("non-finite natural parameter");
  auto [pi, lse] = softmax(eta);
  (void)pi;
  return table.counts.dot(eta) - table.total() * lse;
}

BlockedVector gradient(const Design& design, const BlockedVector& theta,
                       const ContingencyTable& table) {
  const CellDistribution dist = mean_map(design, theta, table.total());
  return design.apply_transpose(table.counts - dist.means());
}

Eigen::MatrixXd hessian(const Design& design, const BlockedVector& theta, double N) {
  const CellDistribution dist = mean_map(design, theta, N);
  const Eigen::MatrixXd u = design.dense();
  const Eigen::VectorXd m = dist.means();
  const Eigen::MatrixXd du = m.asDiagonal() * u;
  return -(u.transpose() * du - (u.transpose() * m) * (m.transpose() * u) / N);
}

FisherInfo fisher_info(const Design& design, const Eigen::VectorXd& pi) {
  if (pi.size() != design.shape().cell_count()) throw std::invalid_argument("pi length mismatch");
  if (pi.minCoeff() <= 0.0) throw std::invalid_argument("pi must be strictly positive");
  if (design.total_cols() == 0) return FisherInfo{Eigen::MatrixXd(0, 0), 0.0, 0.0};
  const Eigen::MatrixXd u = design.dense();
  const Eigen::MatrixXd f =
      u.transpose() * (pi.asDiagonal() * u) - (u.transpose() * pi) * (pi.transpose() * u);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (f + f.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return FisherInfo{f, eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

ContingencyTable sample_table(const TableShape& shape, const CellDistribution& dist, long N,
                              std::mt19937_64& rng) {
  if (dist.pi.size() != shape.cell_count()) throw std::invalid_argument("pi length mismatch");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(shape.cell_count());
  long remaining = N;
  double mass = 1.0;
  // Conditional binomial decomposition of the multinomial.
  for (long i = 0; i + 1 < shape.cell_count() && remaining > 0; ++i) {
    const double p = std::min(1.0, std::max(0.0, dist.pi[i] / mass));
    std::binomial_distribution<long> bin(remaining, p);
    const long draw = bin(rng);
    counts[i] = static_cast<double>(draw);
    remaining -= draw;
    mass -= dist.pi[i];
    if (mass <= 0.0) mass = 0.0;
  }
  counts[shape.cell_count() - 1] += static_cast<double>(remaining);
  return ContingencyTable{shape, std::move(counts)};
}

MleResult fit_mle(const Design& design, const ContingencyTable& table, const MleConfig& config) {
  const double N = table.total();
  if (N <= 0) throw std::invalid_argument("empty table has no MLE");

  MleResult result;
  result.theta = design.zero_vector();
  double ll = log_likelihood(design, result.theta, table);

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    result.iterations = iter;
    const BlockedVector grad = gradient(design, result.theta, table);
    result.grad_inf_norm = grad.max_abs();
    if (result.grad_inf_norm / N <= config.tol) {
      // A vanishing fitted cell means the optimum sits on the boundary of the
      // mean space: the likelihood sup is approached but never attained, so
      // the gradient test alone would misreport existence.
      const double pi_min = mean_map(design, result.theta, 1.0).pi.minCoeff();
      if (pi_min < config.boundary_pi) {
        result.diverged = true;
      } else {
        result.converged = true;
      }
      return result;
    }

    const Eigen::MatrixXd neg_hess = -hessian(design, result.theta, N);
    Eigen::LDLT<Eigen::MatrixXd> solver(neg_hess);
    Eigen::VectorXd step = solver.solve(grad.flat());
    if (!step.allFinite()) {
      result.diverged = true;
      return result;
    }

    // Step halving on the log-likelihood.
    double scale = 1.0;
    const Eigen::VectorXd theta_flat = result.theta.flat();
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      const BlockedVector candidate = design.from_flat(theta_flat + scale * step);
      const double candidate_ll = log_likelihood(design, candidate, table);
      if (candidate_ll >= ll) {
        result.theta = candidate;
        ll = candidate_ll;
        break;
      }
      if (halving == config.max_halvings) {
        // No ascent within the line-search budget; nothing more to report.
        return result;
      }
      scale *= 0.5;
    }

    if (result.theta.max_abs() > config.divergence_bound) {
      result.diverged = true;
      return result;
    }
  }
  const BlockedVector grad = gradient(design, result.theta, table);
  result.grad_inf_norm = grad.max_abs();
  if (result.grad_inf_norm / N <= config.tol) {
    if (mean_map(design, result.theta, 1.0).pi.minCoeff() < config.boundary_pi) {
      result.diverged = true;
    } else {
      result.converged = true;
    }
  }
  return result;
}

}  // namespace loglin
