#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "capdp/experiments.hpp"
#include "capdp/verify.hpp"

namespace capdp {

/// Fixed-precision decimal formatting so reruns are byte identical.
std::string fmt_g(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const FatnessReport& r);
nlohmann::json to_json(const CounterexampleReport& r);
nlohmann::json to_json(const HigherIntReport& r);
nlohmann::json to_json(const OptimalityReport& r);
nlohmann::json to_json(const CapacityResult& r);

void write_reports_csv(const std::string& path, const std::vector<InequalityReport>& reports);
void write_fatness_csv(const std::string& path, const FatnessReport& report);
void write_counterexample_csv(const std::string& path, const CounterexampleReport& report);

}  // namespace capdp
