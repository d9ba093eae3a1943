#include "loglin/json_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace loglin {

using nlohmann::json;

nlohmann::json table_to_json(const ContingencyTable& table) {
  json j;
  j["shape"] = table.shape.levels();
  std::vector<long> counts(table.counts.size());
  for (long i = 0; i < table.counts.size(); ++i) counts[i] = static_cast<long>(table.counts[i]);
  j["counts"] = counts;
  return j;
}

ContingencyTable table_from_json(const nlohmann::json& j) {
  TableShape shape(j.at("shape").get<std::vector<int>>());
  const auto counts = j.at("counts").get<std::vector<double>>();
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(counts.data(), counts.size());
  return make_table(std::move(shape), std::move(v));
}

nlohmann::json facets_to_json(const SimplicialComplex& delta) {
  json facets = json::array();
  for (const auto& d : delta.facets()) facets.push_back(d.members());
  return facets;
}

SimplicialComplex facets_from_json(const nlohmann::json& j, int K) {
  std::vector<FactorSet> facets;
  for (const auto& f : j) facets.push_back(FactorSet::from_members(f.get<std::vector<int>>()));
  return SimplicialComplex(K, std::move(facets));
}

nlohmann::json class_to_json(const InteractionClass& cls) {
  json sets = json::array();
  for (const auto& h : cls.sets()) sets.push_back(h.members());
  return sets;
}

nlohmann::json fit_result_to_json(const FitResult& result, const Design& design) {
  json j;
  json theta = json::object();
  for (std::size_t i = 0; i < design.block_count(); ++i) {
    std::vector<double> block(result.theta.blocks[i].begin(), result.theta.blocks[i].end());
    theta[design.block(i).subset.key()] = block;
  }
  j["theta"] = theta;
  j["active"] = class_to_json(result.active);
  j["facets"] = facets_to_json(result.selected);
  json kkt = json::object();
  for (std::size_t i = 0; i < design.block_count(); ++i) {
    kkt[design.block(i).subset.key()] = result.kkt.residuals[i];
  }
  j["kkt"] = {{"per_block", kkt}, {"worst", result.kkt.worst}};
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["active_hierarchical"] = result.active_hierarchical;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s{TableShape(j.at("shape").get<std::vector<int>>()),
             SimplicialComplex(1, {}),
             {},
             {},
             {},
             PenaltyConfig::WeightRule::kSqrtDim,
             0,
             0,
             {}};
  s.delta0 = facets_from_json(j.at("facets"), s.shape.K());

  const InteractionClass cls = downward_closure(s.delta0);
  const auto& theta0 = j.at("theta0");
  for (const auto& h : cls.sets()) {
    if (!theta0.contains(h.key())) {
      throw std::invalid_argument("theta0 is missing block \"" + h.key() + "\"");
    }
    const auto block = theta0.at(h.key()).get<std::vector<double>>();
    s.theta0.blocks.emplace_back(Eigen::Map<const Eigen::VectorXd>(block.data(), block.size()));
  }

  s.n_ladder = j.at("N_ladder").get<std::vector<long>>();

  const auto& rule = j.at("lambda_rule");
  const std::string type = rule.at("type").get<std::string>();
  if (type == "sqrt_log_over_n") {
    s.lambda_rule.type = LambdaRule::Type::kSqrtLogOverN;
    s.lambda_rule.c = rule.at("c").get<double>();
  } else if (type == "explicit") {
    s.lambda_rule.type = LambdaRule::Type::kExplicit;
    s.lambda_rule.values = rule.at("values").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("unknown lambda rule \"" + type + "\"");
  }

  s.reps = j.at("reps").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("block_weights")) {
    const std::string w = j.at("block_weights").get<std::string>();
    if (w == "sqrt-dim") {
      s.weight_rule = PenaltyConfig::WeightRule::kSqrtDim;
    } else if (w == "unit") {
      s.weight_rule = PenaltyConfig::WeightRule::kUnit;
    } else {
      throw std::invalid_argument("unknown block weight rule \"" + w + "\"");
    }
  }
  if (j.contains("tol")) s.solver.kkt_tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) s.solver.max_iter = j.at("max_iter").get<int>();

  validate_scenario(s);
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["shape"] = s.shape.levels();
  j["facets"] = facets_to_json(s.delta0);
  const InteractionClass cls = downward_closure(s.delta0);
  json theta0 = json::object();
  for (std::size_t i = 0; i < cls.size(); ++i) {
    std::vector<double> block(s.theta0.blocks[i].begin(), s.theta0.blocks[i].end());
    theta0[cls.sets()[i].key()] = block;
  }
  j["theta0"] = theta0;
  j["N_ladder"] = s.n_ladder;
  if (s.lambda_rule.type == LambdaRule::Type::kSqrtLogOverN) {
    j["lambda_rule"] = {{"type", "sqrt_log_over_n"}, {"c", s.lambda_rule.c}};
  } else {
    j["lambda_rule"] = {{"type", "explicit"}, {"values", s.lambda_rule.values}};
  }
  j["reps"] = s.reps;
  j["seed"] = s.seed;
  j["block_weights"] =
      s.weight_rule == PenaltyConfig::WeightRule::kSqrtDim ? "sqrt-dim" : "unit";
  return j;
}

nlohmann::json condition_report_to_json(const ConditionReport& r) {
  json j;
  j["d_H"] = r.d_h;
  j["N"] = r.N;
  j["d_H_over_N"] = r.d_h_over_n;
  j["l_min"] = r.l_min;
  j["l_max"] = r.l_max;
  j["eigen_ratio"] = r.eigen_ratio;
  j["alpha"] = r.alpha;
  j["msc1"] = r.msc1;
  j["msc2_max"] = r.msc2_max ? json(*r.msc2_max) : json();
  j["msc2_bound"] = r.msc2_bound ? json(*r.msc2_bound) : json();
  j["msc3"] = r.msc3 ? json(*r.msc3) : json();
  j["msc4_max"] = r.msc4_max ? json(*r.msc4_max) : json();
  j["clt_ratios"] = {{"d_H_over_sqrt_N", r.clt_ratio_sqrt},
                     {"d_H_7_2_over_N", r.clt_ratio_be},
                     {"d_H_3_over_N", r.clt_ratio_lf}};
  // Rate conditions cannot be judged at a single n; these are trend inputs.
  j["note"] = "o()/O() conditions are rates; track the ratios across an N ladder";
  return j;
}

ContingencyTable load_table(const std::string& path) { return table_from_json(load_json(path)); }

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace loglin
