#include "loglin/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace loglin {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// D_m - m m^T / N at m = N * pi.
Eigen::MatrixXd count_covariance(const Eigen::VectorXd& pi, double N) {
  const Eigen::VectorXd m = N * pi;
  return Eigen::MatrixXd(m.asDiagonal()) - m * m.transpose() / N;
}

Eigen::MatrixXd stack_blocks(const Design& design, const std::vector<std::size_t>& which) {
  long cols = 0;
  for (std::size_t i : which) cols += design.block(i).dim();
  Eigen::MatrixXd u(design.shape().cell_count(), cols);
  long at = 0;
  for (std::size_t i : which) {
    u.middleCols(at, design.block(i).dim()) = design.block(i).matrix.cast<double>();
    at += design.block(i).dim();
  }
  return u;
}

}  // namespace

BlockedVector eta0(const BlockedVector& theta0, const std::vector<double>& block_weights) {
  if (theta0.blocks.size() != block_weights.size()) {
    throw std::invalid_argument("weight/block count mismatch");
  }
  BlockedVector out;
  out.blocks.reserve(theta0.blocks.size());
  for (std::size_t i = 0; i < theta0.blocks.size(); ++i) {
    const double norm = theta0.blocks[i].norm();
    if (norm == 0.0) {
      throw std::invalid_argument("penalty gradient undefined at a zero block");
    }
    out.blocks.push_back(block_weights[i] * theta0.blocks[i] / norm);
  }
  return out;
}

Eigen::MatrixXd j0_matrix(const BlockedVector& theta0, const std::vector<double>& block_weights) {
  if (theta0.blocks.size() != block_weights.size()) {
    throw std::invalid_argument("weight/block count mismatch");
  }
  const long d = theta0.total_size();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(d, d);
  long at = 0;
  for (std::size_t i = 0; i < theta0.blocks.size(); ++i) {
    const long dh = theta0.blocks[i].size();
    const double norm = theta0.blocks[i].norm();
    if (norm == 0.0) {
      throw std::invalid_argument("penalty Hessian undefined at a zero block");
    }
    const Eigen::VectorXd u = theta0.blocks[i] / norm;
    j.block(at, at, dh, dh) =
        (block_weights[i] / norm) * (Eigen::MatrixXd::Identity(dh, dh) - u * u.transpose());
    at += dh;
  }
  return j;
}

CltStatistic clt_statistic(const BlockedVector& theta_hat, const BlockedVector& theta0,
                           const Design& design_h, const Eigen::VectorXd& pi0, double N,
                           double lambda, const std::vector<double>& block_weights) {
  if (design_h.total_cols() == 0) {
    CltStatistic empty;
    empty.f_inv_sqrt = Eigen::MatrixXd(0, 0);
    empty.j0 = Eigen::MatrixXd(0, 0);
    empty.x = Eigen::VectorXd(0);
    return empty;
  }
  const FisherInfo fisher = fisher_info(design_h, pi0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (fisher.matrix + fisher.matrix.transpose()));
  const Eigen::VectorXd evals = eig.eigenvalues();
  const double floor = 1e-12 * evals.maxCoeff();
  if (evals.minCoeff() <= floor) {
    throw std::runtime_error("Fisher information is numerically singular (l_min = " +
                             std::to_string(evals.minCoeff()) + ")");
  }

  CltStatistic out;
  out.f_inv_sqrt =
      eig.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  out.j0 = j0_matrix(theta0, block_weights);
  out.eta0 = eta0(theta0, block_weights);

  const Eigen::VectorXd diff = theta_hat.flat() - theta0.flat();
  const Eigen::VectorXd inner =
      (fisher.matrix + lambda * out.j0) * diff + lambda * out.eta0.flat();
  out.x = std::sqrt(N) * (out.f_inv_sqrt * inner);
  return out;
}

Msc2Report msc2_norms(const Design& saturated, const Eigen::VectorXd& pi0,
                      const InteractionClass& cls, double N, double eps) {
  Msc2Report report;
  std::vector<std::size_t> in_h, in_hc;
  for (std::size_t i = 0; i < saturated.block_count(); ++i) {
    if (cls.contains(saturated.block(i).subset)) {
      in_h.push_back(i);
    } else {
      in_hc.push_back(i);
    }
  }
  if (in_h.size() != cls.size()) {
    throw std::invalid_argument("class contains subsets missing from the design");
  }
  if (in_hc.empty()) return report;  // saturated class: condition vacuous

  report.applicable = true;
  report.bound = (1.0 - eps) / static_cast<double>(in_hc.size());

  const Eigen::MatrixXd sigma0 = count_covariance(pi0, N);
  const Eigen::MatrixXd u_h = stack_blocks(saturated, in_h);
  const Eigen::MatrixXd sigma_h = u_h.transpose() * sigma0 * u_h;
  Eigen::LDLT<Eigen::MatrixXd> solver(sigma_h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("singular sufficient-statistic covariance");
  }
  const Eigen::MatrixXd cross_all = sigma0 * u_h;

  for (std::size_t i : in_hc) {
    const Eigen::MatrixXd u_w = saturated.block(i).matrix.cast<double>();
    const Eigen::MatrixXd block = solver.solve((u_w.transpose() * cross_all).transpose()).transpose();
    report.per_block_norms.push_back(spectral_norm(block));
  }
  const Eigen::MatrixXd u_hc = stack_blocks(saturated, in_hc);
  const Eigen::MatrixXd w_n =
      solver.solve((u_hc.transpose() * cross_all).transpose()).transpose();
  report.w_matrix_norm = spectral_norm(w_n);
  return report;
}

AddendumReport addendum_norms(const Design& design_h, const Eigen::VectorXd& pi0, double eps) {
  AddendumReport report;
  const std::size_t count = design_h.block_count();
  report.bound = (1.0 - eps) / static_cast<double>(count);
  const Eigen::MatrixXd sigma0 = count_covariance(pi0, 1.0);  // N cancels

  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < count; ++j) {
      if (j != i) rest.push_back(j);
    }
    if (rest.empty()) {
      report.per_block_norms.push_back(0.0);
      continue;
    }
    const Eigen::MatrixXd u_h = design_h.block(i).matrix.cast<double>();
    const Eigen::MatrixXd u_rest = stack_blocks(design_h, rest);
    const Eigen::MatrixXd gram = u_h.transpose() * sigma0 * u_h;
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("singular block Gram matrix at " + design_h.block(i).subset.key());
    }
    const Eigen::MatrixXd block =
        solver.solve((u_rest.transpose() * sigma0 * u_h).transpose()).transpose();
    report.per_block_norms.push_back(spectral_norm(block));
  }
  return report;
}

ConditionReport condition_report(const Design& saturated, const Eigen::VectorXd& pi0,
                                 const BlockedVector& theta0, const InteractionClass& cls,
                                 double N, const PenaltyConfig& penalty, double eps) {
  if (theta0.blocks.size() != cls.size()) {
    throw std::invalid_argument("theta0 must have one block per class member");
  }
  ConditionReport report;
  report.N = N;

  const Design design_h = assemble_design(saturated.shape(), cls);
  report.d_h = design_h.total_cols();
  report.d_h_over_n = report.d_h / N;

  const FisherInfo fisher = fisher_info(design_h, pi0);
  report.l_min = fisher.l_min;
  report.l_max = fisher.l_max;
  report.eigen_ratio = std::sqrt(fisher.l_max) / fisher.l_min;

  const auto weights_h = penalty.block_weights(design_h);
  double alpha = std::numeric_limits<double>::infinity();
  double sum_sq_weights = 0.0;
  double max_weight_h = 0.0;
  for (std::size_t i = 0; i < theta0.blocks.size(); ++i) {
    alpha = std::min(alpha, theta0.blocks[i].norm());
    sum_sq_weights += weights_h[i] * weights_h[i];
    max_weight_h = std::max(max_weight_h, weights_h[i]);
  }
  report.alpha = alpha;
  report.msc1 =
      (std::sqrt(report.d_h / N) + penalty.lambda * std::sqrt(sum_sq_weights)) / alpha;

  const InteractionClass complement = complement_class(cls, saturated.shape().K());
  if (complement.size() > 0) {
    const Msc2Report msc2 = msc2_norms(saturated, pi0, cls, N, eps);
    double worst = 0.0;
    for (double v : msc2.per_block_norms) worst = std::max(worst, v);
    report.msc2_max = worst;
    report.msc2_bound = msc2.bound;

    const auto weights_all = penalty.block_weights(saturated);
    double min_weight_w = std::numeric_limits<double>::infinity();
    double msc4 = 0.0;
    for (std::size_t i = 0; i < saturated.block_count(); ++i) {
      if (cls.contains(saturated.block(i).subset)) continue;
      min_weight_w = std::min(min_weight_w, weights_all[i]);
      if (penalty.lambda > 0.0) {
        msc4 = std::max(msc4, std::sqrt(double(saturated.block(i).dim())) /
                                  (std::sqrt(N) * penalty.lambda * weights_all[i]));
      }
    }
    report.msc3 = (double(cls.size()) * max_weight_h) / (double(complement.size()) * min_weight_w);
    if (penalty.lambda > 0.0) report.msc4_max = msc4;
  }

  report.clt_ratio_sqrt = report.d_h / std::sqrt(N);
  report.clt_ratio_be = std::pow(double(report.d_h), 3.5) / N;
  report.clt_ratio_lf = std::pow(double(report.d_h), 3.0) / N;
  return report;
}

}  // namespace loglin
