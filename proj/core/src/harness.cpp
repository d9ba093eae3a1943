#include "loglin/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace loglin {

double LambdaRule::at(std::size_t rung, long cells, double N) const {
  switch (type) {
    case Type::kSqrtLogOverN:
      return c * std::sqrt(std::log(double(cells)) / N);
    case Type::kExplicit:
      if (rung >= values.size()) throw std::invalid_argument("lambda rule has too few values");
      return values[rung];
  }
  throw std::logic_error("unreachable");
}

void validate_scenario(const Scenario& scenario) {
  const InteractionClass cls = downward_closure(scenario.delta0);
  if (scenario.theta0.blocks.size() != cls.size()) {
    throw std::invalid_argument("theta0 must have one block per interaction in the closure");
  }
  const Design design_h = assemble_design(scenario.shape, cls);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (scenario.theta0.blocks[i].size() != design_h.block(i).dim()) {
      throw std::invalid_argument("theta0 block " + cls.sets()[i].key() + " has wrong length");
    }
    if (scenario.theta0.blocks[i].norm() == 0.0) {
      throw std::invalid_argument("theta0 block " + cls.sets()[i].key() + " must be nonzero");
    }
  }
  if (scenario.n_ladder.empty() && scenario.reps > 0) {
    throw std::invalid_argument("scenario needs at least one ladder rung");
  }
  for (std::size_t i = 1; i < scenario.n_ladder.size(); ++i) {
    if (scenario.n_ladder[i] <= scenario.n_ladder[i - 1]) {
      throw std::invalid_argument("N ladder must be strictly increasing");
    }
  }
  if (scenario.reps <= 0) throw std::invalid_argument("reps must be positive");
  if (static_cast<long>(scenario.reps) * static_cast<long>(std::max<std::size_t>(
          scenario.n_ladder.size(), 1)) > kMaxTotalReps) {
    throw std::invalid_argument("scenario exceeds the replication guardrail");
  }
  if (scenario.lambda_rule.type == LambdaRule::Type::kExplicit &&
      scenario.lambda_rule.values.size() < scenario.n_ladder.size()) {
    throw std::invalid_argument("explicit lambda rule needs one value per rung");
  }
}

std::uint64_t derive_seed(std::uint64_t scenario_seed, std::size_t rung, int rep) {
  // splitmix64 over a counter; streams are independent of execution order.
  std::uint64_t z = scenario_seed + 0x9E3779B97F4A7C15ull * (1 + rung * 1000003ull +
                                                             static_cast<std::uint64_t>(rep));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double ks_distance_normal(std::vector<double> sample) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-sample[i] / std::sqrt(2.0));
    d = std::max(d, std::abs(cdf - double(i + 1) / n));
    d = std::max(d, std::abs(cdf - double(i) / n));
  }
  return d;
}

SimulationSummary run_scenario(const Scenario& scenario) {
  validate_scenario(scenario);

  const InteractionClass cls = downward_closure(scenario.delta0);
  const Design design_h = assemble_design(scenario.shape, cls);
  const Design design_sat = saturated_design(scenario.shape);
  const CellDistribution truth = mean_map(design_h, scenario.theta0, 1.0);

  // Indices of the H blocks inside the saturated design.
  std::vector<std::size_t> h_index;
  for (std::size_t i = 0; i < design_sat.block_count(); ++i) {
    if (cls.contains(design_sat.block(i).subset)) h_index.push_back(i);
  }

  PenaltyConfig penalty;
  penalty.rule = scenario.weight_rule;
  const auto weights_h = penalty.block_weights(design_h);

  SimulationSummary summary;
  for (std::size_t rung = 0; rung < scenario.n_ladder.size(); ++rung) {
    const auto start = std::chrono::steady_clock::now();
    const long N = scenario.n_ladder[rung];
    penalty.lambda = scenario.lambda_rule.at(rung, scenario.shape.cell_count(), double(N));

    RungSummary row;
    row.N = double(N);
    row.lambda = penalty.lambda;

    std::vector<double> l2_errors;
    std::vector<std::vector<double>> xn_pool(design_h.total_cols());
    double kkt_sum = 0.0;
    int recovered = 0;
    int counted = 0;

    for (int rep = 0; rep < scenario.reps; ++rep) {
      std::mt19937_64 rng(derive_seed(scenario.seed, rung, rep));
      const ContingencyTable table = sample_table(scenario.shape, truth, N, rng);
      FitResult result;
      try {
        result = fit(design_sat, table, penalty, scenario.solver);
      } catch (const std::exception&) {
        ++row.failures;
        continue;
      }
      if (!result.converged) {
        ++row.failures;
        continue;
      }
      ++counted;
      kkt_sum += result.kkt.worst;

      double err_sq = 0.0;
      for (std::size_t i = 0; i < h_index.size(); ++i) {
        err_sq += (result.theta.blocks[h_index[i]] - scenario.theta0.blocks[i]).squaredNorm();
      }
      l2_errors.push_back(std::sqrt(err_sq));

      if (result.selected == scenario.delta0) {
        ++recovered;
        BlockedVector theta_hat_h;
        for (std::size_t i : h_index) theta_hat_h.blocks.push_back(result.theta.blocks[i]);
        const CltStatistic stat = clt_statistic(theta_hat_h, scenario.theta0, design_h, truth.pi,
                                                double(N), penalty.lambda, weights_h);
        for (long j = 0; j < stat.x.size(); ++j) xn_pool[j].push_back(stat.x[j]);
      }
    }

    if (counted > 0) {
      row.recovery_rate = double(recovered) / counted;
      row.recovery_se = std::sqrt(row.recovery_rate * (1.0 - row.recovery_rate) / counted);
      row.mean_kkt = kkt_sum / counted;
      row.conditioning_rate = double(recovered) / counted;
      std::sort(l2_errors.begin(), l2_errors.end());
      const std::size_t m = l2_errors.size();
      row.median_l2_error =
          (m % 2 == 1) ? l2_errors[m / 2] : 0.5 * (l2_errors[m / 2 - 1] + l2_errors[m / 2]);
      for (const auto& coord : xn_pool) {
        row.ks_max = std::max(row.ks_max, ks_distance_normal(coord));
      }
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary.rungs.push_back(row);
    if (rung + 1 == scenario.n_ladder.size()) summary.last_rung_xn = std::move(xn_pool);
  }
  return summary;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void emit_csv(const SimulationSummary& summary, std::ostream& out, bool include_timing) {
  out << "N,lambda,recovery_rate,recovery_se,median_l2_error,mean_kkt,ks_max,"
         "conditioning_rate,failures,seconds\n";
  for (const auto& row : summary.rungs) {
    out << format_double(row.N) << ',' << format_double(row.lambda) << ','
        << format_double(row.recovery_rate) << ',' << format_double(row.recovery_se) << ','
        << format_double(row.median_l2_error) << ',' << format_double(row.mean_kkt) << ','
        << format_double(row.ks_max) << ',' << format_double(row.conditioning_rate) << ','
        << row.failures << ',' << format_double(include_timing ? row.seconds : 0.0) << '\n';
  }
}

}  // namespace loglin
