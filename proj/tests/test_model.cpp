#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "loglin/model.hpp"
#include "oracles.hpp"

using namespace loglin;

namespace {

ContingencyTable random_table(const TableShape& shape, std::mt19937_64& rng, long N = 200) {
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(shape.cell_count(), 1.0 / shape.cell_count());
  CellDistribution dist = make_distribution(pi, static_cast<double>(N));
  ContingencyTable t = sample_table(shape, dist, N, rng);
  t.counts.array() += 1.0;  // keep every cell positive
  return t;
}

BlockedVector random_theta(const Design& design, std::mt19937_64& rng, double scale = 0.5) {
  std::normal_distribution<double> gauss(0.0, scale);
  BlockedVector theta = design.zero_vector();
  for (auto& b : theta.blocks) {
    for (long i = 0; i < b.size(); ++i) b[i] = gauss(rng);
  }
  return theta;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("table and distribution validation") {
  TableShape shape({2, 2});
  CHECK_THROWS(make_table(shape, Eigen::Vector3d(1, 2, 3)));          // wrong length
  CHECK_THROWS(make_table(shape, Eigen::Vector4d(1, -1, 2, 3)));      // negative
  CHECK_THROWS(make_table(shape, Eigen::Vector4d(1, 2.5, 2, 3)));     // not integer
  CHECK_NOTHROW(make_table(shape, Eigen::Vector4d(0, 2, 2, 3)));

  CHECK_THROWS(make_distribution(Eigen::Vector2d(0.0, 1.0), 10.0));   // zero cell
  CHECK_THROWS(make_distribution(Eigen::Vector2d(0.3, 0.3), 10.0));   // not normalized
  const auto d = make_distribution(Eigen::Vector2d(0.25, 0.75), 8.0);
  CHECK(d.means()(1) == 6.0);
}

TEST_CASE("mean map: uniform at zero, softmax on one factor, shift invariant") {
  const Design d = saturated_design(TableShape({2, 2}));
  const auto uniform = mean_map(d, d.zero_vector(), 4.0);
  CHECK((uniform.pi.array() - 0.25).abs().maxCoeff() < 1e-15);

  const Design d1 = saturated_design(TableShape({2}));
  BlockedVector theta = d1.zero_vector();
  const double t = 0.7;
  theta.blocks[0][0] = t;
  const auto p = mean_map(d1, theta, 1.0);
  const double want = std::exp(t) / (std::exp(t) + std::exp(-t));
  CHECK(p.pi[0] == doctest::Approx(want).epsilon(1e-12));

  // Large theta exercises the max-shift stabilization.
  theta.blocks[0][0] = 500.0;
  const auto big = mean_map(d1, theta, 1.0);
  CHECK(std::isfinite(big.pi[0]));
  CHECK(big.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));

  BlockedVector nan = d1.zero_vector();
  nan.blocks[0][0] = std::nan("");
  CHECK_THROWS(mean_map(d1, nan, 1.0));
}

TEST_CASE("log likelihood values") {
  const Design d = saturated_design(TableShape({2, 2}));
  ContingencyTable t = make_table(TableShape({2, 2}), Eigen::Vector4d(3, 1, 4, 2));
  CHECK(log_likelihood(d, d.zero_vector(), t) ==
        doctest::Approx(-10.0 * std::log(4.0)).epsilon(1e-12));

  // Scalar case against a direct evaluation.
  const Design d1 = saturated_design(TableShape({2}));
  ContingencyTable t1 = make_table(TableShape({2}), Eigen::Vector2d(3, 1));
  BlockedVector theta = d1.zero_vector();
  theta.blocks[0][0] = 0.5;
  const double want = oracle::dense_loglik(d1.dense(), theta.flat(), t1.counts);
  CHECK(log_likelihood(d1, theta, t1) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("log likelihood is midpoint concave on random pairs") {
  std::mt19937_64 rng(7);
  const TableShape shape({2, 3});
  const Design d = saturated_design(shape);
  const ContingencyTable t = random_table(shape, rng);
  for (int rep = 0; rep < 20; ++rep) {
    const BlockedVector a = random_theta(d, rng);
    const BlockedVector b = random_theta(d, rng);
    BlockedVector mid = a;
    for (std::size_t i = 0; i < mid.blocks.size(); ++i) {
      mid.blocks[i] = 0.5 * (a.blocks[i] + b.blocks[i]);
    }
    CHECK(log_likelihood(d, mid, t) >=
          0.5 * (log_likelihood(d, a, t) + log_likelihood(d, b, t)) - 1e-10);
  }
}

TEST_CASE("gradient hand value and first-order condition at the saturated MLE") {
  const Design d1 = saturated_design(TableShape({2}));
  ContingencyTable t1 = make_table(TableShape({2}), Eigen::Vector2d(3, 1));
  const auto g = gradient(d1, d1.zero_vector(), t1);
  CHECK(g.blocks[0][0] == doctest::Approx(2.0).epsilon(1e-12));

  const TableShape shape({2, 2});
  const Design d = saturated_design(shape);
  const ContingencyTable t = make_table(shape, Eigen::Vector4d(10, 20, 30, 40));
  const auto mle = fit_mle(d, t);
  REQUIRE(mle.converged);
  CHECK(gradient(d, mle.theta, t).max_abs() < 1e-8 * t.total());
}

TEST_CASE("gradient and hessian match finite differences on random triples") {
  std::mt19937_64 rng(11);
  const std::vector<std::vector<int>> shapes = {{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}, {3, 3, 3}};
  for (const auto& levels : shapes) {
    TableShape shape(levels);
    const Design d = saturated_design(shape);
    const Eigen::MatrixXd u = d.dense();
    for (int rep = 0; rep < 4; ++rep) {
      const ContingencyTable t = random_table(shape, rng);
      const BlockedVector theta = random_theta(d, rng);
      const Eigen::VectorXd x = theta.flat();
      auto f = [&](const Eigen::VectorXd& v) { return oracle::dense_loglik(u, v, t.counts); };

      const Eigen::VectorXd g = gradient(d, theta, t).flat();
      const Eigen::VectorXd g_fd = oracle::fd_gradient(f, x);
      CHECK((g - g_fd).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));

      const Eigen::MatrixXd h = hessian(d, theta, t.total());
      for (long j = 0; j < x.size(); ++j) {
        auto gj = [&](const Eigen::VectorXd& v) {
          BlockedVector tv = d.from_flat(v);
          return gradient(d, tv, t).flat()(j);
        };
        const Eigen::VectorXd hj = oracle::fd_gradient(gj, x);
        CHECK((h.row(j).transpose() - hj).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, h.cwiseAbs().maxCoeff()));
      }

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      CHECK(es.eigenvalues().maxCoeff() <= 1e-10);  // concavity
    }
  }
}

TEST_CASE("fisher information scalar case and uniform identity") {
  const Design d1 = saturated_design(TableShape({2}));
  const auto f1 = fisher_info(d1, Eigen::Vector2d(0.5, 0.5));
  CHECK(f1.matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.l_min == doctest::Approx(1.0));
  CHECK(f1.l_max == doctest::Approx(1.0));

  // Uniform pi: D_pi - pi pi^T acts as (1/I) I on the column-sum-zero design.
  const Design d = saturated_design(TableShape({2, 3}));
  const long I = 6;
  const auto f = fisher_info(d, Eigen::VectorXd::Constant(I, 1.0 / I));
  const Eigen::MatrixXd u = d.dense();
  CHECK((f.matrix - u.transpose() * u / static_cast<double>(I)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(fisher_info(d1, Eigen::Vector2d(1.0, 0.0)));
}

TEST_CASE("fisher information is positive definite for positive pi up to (3,3)") {
  std::mt19937_64 rng(3);
  const Design d = saturated_design(TableShape({3, 3}));
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd pi(9);
    for (long i = 0; i < 9; ++i) pi[i] = gamma(rng) + 1e-3;
    pi /= pi.sum();
    CHECK(fisher_info(d, pi).l_min > 0.0);
  }
}

TEST_CASE("hessian equals minus the sufficient-statistic covariance N*F") {
  std::mt19937_64 rng(5);
  const Design d = saturated_design(TableShape({2, 2, 2}));
  const BlockedVector theta = random_theta(d, rng);
  const double N = 37.0;
  const auto dist = mean_map(d, theta, N);
  const Eigen::MatrixXd h = hessian(d, theta, N);
  const Eigen::MatrixXd f = fisher_info(d, dist.pi).matrix;
  CHECK((h + N * f).cwiseAbs().maxCoeff() < 1e-10 * N);
}

TEST_CASE("sampling: degenerate, empty, and law of large numbers") {
  TableShape shape({2, 2});
  std::mt19937_64 rng(99);

  Eigen::VectorXd nearly(4);
  const double eps = 1e-12;
  nearly << 1.0 - eps, eps / 3, eps / 3, eps / 3;
  const auto t = sample_table(shape, make_distribution(nearly, 100), 100, rng);
  CHECK(t.counts(0) == 100.0);

  const auto empty = sample_table(shape, make_distribution(nearly, 0), 0, rng);
  CHECK(empty.counts.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd pi(4);
  pi << 0.1, 0.2, 0.3, 0.4;
  const long n = 100000;
  const auto big = sample_table(shape, make_distribution(pi, n), n, rng);
  CHECK(big.total() == static_cast<double>(n));
  for (long i = 0; i < 4; ++i) {
    const double sd = std::sqrt(n * pi[i] * (1 - pi[i]));
    CHECK(std::abs(big.counts[i] - n * pi[i]) <= 3.0 * sd);
  }
}

TEST_CASE("sampling is deterministic given the generator seed") {
  TableShape shape({2, 3});
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
  const auto dist = make_distribution(pi, 500);
  std::mt19937_64 a(2024), b(2024);
  CHECK(sample_table(shape, dist, 500, a).counts == sample_table(shape, dist, 500, b).counts);
}

TEST_CASE("saturated MLE reproduces the observed proportions") {
  const TableShape shape({2, 2, 2});
  Eigen::VectorXd counts(8);
  counts << 5, 9, 13, 2, 7, 11, 4, 6;
  const ContingencyTable t = make_table(shape, counts);
  const Design d = saturated_design(shape);
  const auto mle = fit_mle(d, t);
  REQUIRE(mle.converged);
  const auto fitted = mean_map(d, mle.theta, t.total());
  CHECK((fitted.means() - counts).cwiseAbs().maxCoeff() < 1e-8 * t.total());
}

TEST_CASE("independence MLE matches the closed-form margins product") {
  const TableShape shape({2, 2});
  const ContingencyTable t = make_table(shape, Eigen::Vector4d(10, 20, 30, 40));
  const Design d = assemble_design(shape, InteractionClass(2, {{1}, {2}}));
  const auto mle = fit_mle(d, t);
  REQUIRE(mle.converged);
  const auto fitted = mean_map(d, mle.theta, t.total());
  // rows (30, 70), cols (40, 60), N = 100
  Eigen::Vector4d want(30.0 * 40 / 100, 30.0 * 60 / 100, 70.0 * 40 / 100, 70.0 * 60 / 100);
  CHECK((fitted.means() - want).cwiseAbs().maxCoeff() < 1e-8 * t.total());
}

TEST_CASE("zero margin makes the saturated MLE diverge, reported not thrown") {
  const TableShape shape({2, 2});
  const ContingencyTable t = make_table(shape, Eigen::Vector4d(0, 10, 20, 30));
  const auto mle = fit_mle(saturated_design(shape), t);
  CHECK(mle.diverged);
  CHECK(!mle.converged);
  CHECK(mle.theta.max_abs() > 0.0);  // last iterate kept for diagnostics
}

}  // TEST_SUITE
