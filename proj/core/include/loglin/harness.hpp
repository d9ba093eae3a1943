#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "loglin/asymptotics.hpp"
#include "loglin/glasso.hpp"

namespace loglin {

/// Guardrail on the total replication count of a scenario.
inline constexpr long kMaxTotalReps = 100000;

struct LambdaRule {
  enum class Type { kSqrtLogOverN, kExplicit };

  Type type = Type::kSqrtLogOverN;
  double c = 0.5;                 // lambda = c * sqrt(log(I) / N)
  std::vector<double> values;     // one per ladder rung when explicit

  double at(std::size_t rung, long cells, double N) const;
};

struct Scenario {
  TableShape shape;
  SimplicialComplex delta0;
  BlockedVector theta0;  // on downward_closure(delta0), all blocks nonzero
  std::vector<long> n_ladder;  // strictly increasing
  LambdaRule lambda_rule;
  PenaltyConfig::WeightRule weight_rule = PenaltyConfig::WeightRule::kSqrtDim;
  int reps = 0;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

void validate_scenario(const Scenario& scenario);

struct RungSummary {
  double N = 0.0;
  double lambda = 0.0;
  double recovery_rate = 0.0;
  double recovery_se = 0.0;
  double median_l2_error = 0.0;   // ||theta_hat - theta0|| on the H blocks
  double mean_kkt = 0.0;
  double ks_max = 0.0;            // worst per-coordinate KS of X_n, on recovered reps
  double conditioning_rate = 0.0; // fraction of reps entering the X_n pool
  int failures = 0;
  double seconds = 0.0;
};

struct SimulationSummary {
  std::vector<RungSummary> rungs;
  /// Per-coordinate pools of X_n values at the last rung, for normality
  /// diagnostics beyond the KS scalar.
  std::vector<std::vector<double>> last_rung_xn;
};

/// Deterministic stream seed for one replication.
std::uint64_t derive_seed(std::uint64_t scenario_seed, std::size_t rung, int rep);

SimulationSummary run_scenario(const Scenario& scenario);

/// One RFC-4180 row per rung, fixed header, shortest round-trip numbers.
/// Measured wall time is excluded by default so that repeated runs of the
/// same scenario produce byte-identical files.
void emit_csv(const SimulationSummary& summary, std::ostream& out, bool include_timing = false);

/// Kolmogorov-Smirnov distance of a sample from the standard normal.
double ks_distance_normal(std::vector<double> sample);

}  // namespace loglin
