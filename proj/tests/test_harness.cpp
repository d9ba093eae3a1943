#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "loglin/harness.hpp"
#include "oracles.hpp"

using namespace loglin;

namespace {

Scenario independence_scenario() {
  Scenario s{TableShape({2, 2}),
             SimplicialComplex(2, {{1}, {2}}),
             {},
             {400, 1600},
             {},
             PenaltyConfig::WeightRule::kSqrtDim,
             50,
             12345,
             {}};
  s.theta0.blocks.push_back(Eigen::VectorXd::Constant(1, 0.6));
  s.theta0.blocks.push_back(Eigen::VectorXd::Constant(1, -0.5));
  s.lambda_rule.c = 0.6;
  return s;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("lambda rule") {
  LambdaRule rule;
  rule.c = 0.5;
  CHECK(rule.at(0, 8, 500.0) ==
        doctest::Approx(0.5 * std::sqrt(std::log(8.0) / 500.0)).epsilon(1e-12));

  LambdaRule ex;
  ex.type = LambdaRule::Type::kExplicit;
  ex.values = {0.2, 0.1};
  CHECK(ex.at(1, 8, 999.0) == 0.1);
  CHECK_THROWS(ex.at(2, 8, 999.0));  // rung beyond the list
}

TEST_CASE("scenario validation") {
  Scenario s = independence_scenario();
  CHECK_NOTHROW(validate_scenario(s));

  Scenario bad = s;
  bad.n_ladder = {400, 400};
  CHECK_THROWS(validate_scenario(bad));  // not strictly increasing

  bad = s;
  bad.theta0.blocks[1].setZero();
  CHECK_THROWS(validate_scenario(bad));  // zero block on the true class

  bad = s;
  bad.reps = 0;
  CHECK_THROWS(validate_scenario(bad));

  bad = s;
  bad.reps = 60000;
  CHECK_THROWS(validate_scenario(bad));  // guardrail: reps * rungs > 1e5
}

TEST_CASE("derived seeds differ across reps and repeat across calls") {
  CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("kolmogorov-smirnov distance") {
  // Exact value for a single point at 0: max(F(0), 1-F(0)) = 0.5.
  CHECK(ks_distance_normal({0.0}) == doctest::Approx(0.5));

  // Large standard normal sample: small distance.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss;
  std::vector<double> sample(20000);
  for (auto& x : sample) x = gauss(rng);
  CHECK(ks_distance_normal(sample) < 0.02);

  // Shifted sample: distance near Phi(0.5 shift) gap, clearly large.
  for (auto& x : sample) x += 1.0;
  CHECK(ks_distance_normal(sample) > 0.3);
}

TEST_CASE("null scenario recovers the empty model in every rep") {
  Scenario s{TableShape({2, 2}),
             SimplicialComplex(2, {}),
             {},
             {100, 200},
             {},
             PenaltyConfig::WeightRule::kSqrtDim,
             40,
             7,
             {}};
  s.lambda_rule.type = LambdaRule::Type::kExplicit;
  s.lambda_rule.values = {5.0, 5.0};  // far above any screening bound
  const auto summary = run_scenario(s);
  for (const auto& rung : summary.rungs) {
    CHECK(rung.recovery_rate == 1.0);
    CHECK(rung.failures == 0);
  }
}

TEST_CASE("independence scenario improves with N and reports coherent fields") {
  const auto summary = run_scenario(independence_scenario());
  REQUIRE(summary.rungs.size() == 2);
  for (const auto& rung : summary.rungs) {
    CHECK(rung.recovery_rate >= 0.0);
    CHECK(rung.recovery_rate <= 1.0);
    CHECK(rung.recovery_se ==
          doctest::Approx(std::sqrt(rung.recovery_rate * (1 - rung.recovery_rate) / 50.0)));
    CHECK(rung.conditioning_rate == rung.recovery_rate);
    CHECK(rung.mean_kkt <= 1e-7);
    CHECK(rung.failures == 0);
  }
  CHECK(summary.rungs[1].median_l2_error < summary.rungs[0].median_l2_error);
  CHECK(summary.last_rung_xn.size() == 2);  // d_H = 2 coordinate pools
}

TEST_CASE("run_scenario is deterministic") {
  const Scenario s = independence_scenario();
  std::ostringstream a, b;
  emit_csv(run_scenario(s), a);
  emit_csv(run_scenario(s), b);
  CHECK(a.str() == b.str());
  CHECK(!a.str().empty());
}

TEST_CASE("csv shape, header, and numeric round trip") {
  const auto summary = run_scenario(independence_scenario());
  std::ostringstream out;
  emit_csv(summary, out);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 3);
  const std::vector<std::string> header = {
      "N",      "lambda", "recovery_rate",     "recovery_se", "median_l2_error",
      "mean_kkt", "ks_max", "conditioning_rate", "failures",    "seconds"};
  CHECK(rows[0] == header);
  for (std::size_t r = 0; r < summary.rungs.size(); ++r) {
    const auto& rung = summary.rungs[r];
    const auto& row = rows[r + 1];
    REQUIRE(row.size() == 10);
    CHECK(std::stod(row[0]) == rung.N);
    CHECK(std::stod(row[1]) == rung.lambda);  // shortest round-trip formatting
    CHECK(std::stod(row[2]) == rung.recovery_rate);
    CHECK(std::stod(row[4]) == rung.median_l2_error);
    CHECK(std::stod(row[6]) == rung.ks_max);
    CHECK(std::stod(row[9]) == 0.0);  // timing suppressed by default
  }

  SimulationSummary empty;
  std::ostringstream none;
  emit_csv(empty, none);
  CHECK(parse_csv(none.str()).size() == 1);  // header only
}

TEST_CASE("error scaling slope is near -1/2 for a fixed model") {
  Scenario s = independence_scenario();
  s.n_ladder = {250, 1000, 4000, 16000};
  s.reps = 60;
  s.seed = 99;
  const auto summary = run_scenario(s);
  std::vector<double> lx, ly;
  for (const auto& rung : summary.rungs) {
    lx.push_back(std::log(rung.N));
    ly.push_back(std::log(rung.median_l2_error));
  }
  const double slope = oracle::regression_slope(lx, ly);
  CHECK(slope > -0.65);
  CHECK(slope < -0.35);
}

}  // TEST_SUITE
