#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "loglin/glasso.hpp"
#include "loglin/harness.hpp"

namespace loglin {

nlohmann::json table_to_json(const ContingencyTable& table);
ContingencyTable table_from_json(const nlohmann::json& j);

nlohmann::json facets_to_json(const SimplicialComplex& delta);
SimplicialComplex facets_from_json(const nlohmann::json& j, int K);

nlohmann::json class_to_json(const InteractionClass& cls);

/// {"theta": {"1,2": [...]}, "active": [[...]], "facets": [[...]],
///  "kkt": {...}, "converged": bool, "iterations": int}
nlohmann::json fit_result_to_json(const FitResult& result, const Design& design);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);

nlohmann::json condition_report_to_json(const ConditionReport& report);

ContingencyTable load_table(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace loglin
