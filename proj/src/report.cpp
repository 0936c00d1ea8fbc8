#include "capdp/report.hpp"

#include <cstdio>
#include <fstream>

namespace capdp {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json to_json(const InequalityReport& r) {
  return {{"check", r.name},
          {"z", {r.z[0], r.z[1], r.z[2]}},
          {"r", r.r},
          {"t", r.t},
          {"test_id", r.test_id},
          {"lhs", r.lhs},
          {"rhs_raw", r.rhs_raw},
          {"implied_constant", r.implied_constant},
          {"verdict", r.pass ? "PASS" : "FAIL"},
          {"degenerate", r.degenerate},
          {"note", r.note}};
}

nlohmann::json to_json(const FatnessReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"z", {e.z[0], e.z[1], e.z[2]}},
                       {"r", e.r},
                       {"ratio", e.ratio},
                       {"cap_num", e.cap_num},
                       {"cap_den", e.cap_den},
                       {"converged", e.converged}});
  const char* kind = r.kind == CapKind::P ? "p" : r.kind == CapKind::Q ? "q" : "infimal";
  return {{"kind", kind}, {"min_ratio", r.min_ratio}, {"note", r.note}, {"entries", entries}};
}

nlohmann::json to_json(const CounterexampleReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"r", row.r},
                    {"mean_phi_u", row.mean_phi_u},
                    {"grad_energy", row.grad_energy},
                    {"grad_energy_exact", row.grad_energy_exact},
                    {"Q", row.Q},
                    {"Q_scaled_p", row.Q_scaled_p},
                    {"Q_scaled_q", row.Q_scaled_q},
                    {"I1d", row.I1d},
                    {"sandwich_ok", row.sandwich_ok}});
  return {{"n", r.n},     {"p", r.p},
          {"q", r.q},     {"a_o", r.a_o},
          {"rows", rows}, {"all_sandwich_ok", r.all_sandwich_ok}};
}

nlohmann::json to_json(const HigherIntReport& r) {
  return {{"sigma_grid", r.sigma_grid},
          {"h_levels", r.h_levels},
          {"energies", r.energies},
          {"sigma_star", r.sigma_star},
          {"a_P", r.a_P_infinite ? nlohmann::json("inf") : nlohmann::json(r.a_P)},
          {"rho", r.rho},
          {"P_node_count", r.P_node_count},
          {"diam", r.diam},
          {"theorem_rhs", r.theorem_rhs},
          {"sigma1_stable", r.sigma1_stable}};
}

nlohmann::json to_json(const OptimalityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"h", row.h},
                    {"max_grad", row.max_grad},
                    {"pointwise_bound", row.pointwise_bound},
                    {"higher_energies", row.higher_energies}});
  return {{"p", r.p}, {"deltas", r.deltas}, {"rows", rows}};
}

nlohmann::json to_json(const CapacityResult& r) {
  nlohmann::json j = {{"value", r.value},
                      {"iterations", r.iterations},
                      {"final_relative_decrease", r.final_relative_decrease},
                      {"delta_used", r.delta_used},
                      {"not_converged", r.not_converged},
                      {"boundary_minimum", r.boundary_minimum}};
  if (r.level_t) j["level_t"] = *r.level_t;
  if (!r.t_curve.empty()) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [t, v] : r.t_curve) curve.push_back({{"t", t}, {"value", v}});
    j["t_curve"] = curve;
  }
  return j;
}

void write_reports_csv(const std::string& path, const std::vector<InequalityReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports)
    rows.push_back({r.name, fmt_g(r.z[0]), fmt_g(r.z[1]), fmt_g(r.z[2]), fmt_g(r.r), fmt_g(r.t),
                    r.test_id, fmt_g(r.lhs), fmt_g(r.rhs_raw), fmt_g(r.implied_constant),
                    r.pass ? "PASS" : "FAIL"});
  write_csv(path, {"check", "z0", "z1", "z2", "r", "t", "test_id", "lhs", "rhs_raw", "constant",
                   "verdict"},
            rows);
}

void write_fatness_csv(const std::string& path, const FatnessReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : report.entries)
    rows.push_back({fmt_g(e.z[0]), fmt_g(e.z[1]), fmt_g(e.z[2]), fmt_g(e.r), fmt_g(e.ratio),
                    e.converged ? "1" : "0"});
  write_csv(path, {"z0", "z1", "z2", "r", "ratio", "converged"}, rows);
}

void write_counterexample_csv(const std::string& path, const CounterexampleReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : report.rows)
    rows.push_back({fmt_g(row.r), fmt_g(row.mean_phi_u), fmt_g(row.grad_energy),
                    fmt_g(row.grad_energy_exact), fmt_g(row.Q), fmt_g(row.Q_scaled_p),
                    fmt_g(row.Q_scaled_q), fmt_g(row.I1d), row.sandwich_ok ? "1" : "0"});
  write_csv(path,
            {"r", "mean_phi_u", "grad_energy", "grad_energy_exact", "Q", "Q_scaled_p",
             "Q_scaled_q", "I1d", "sandwich_ok"},
            rows);
}

}  // namespace capdp
