#include "binormal/report.hpp"

namespace binormal {

nlohmann::ordered_json to_json(const Point& p) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

nlohmann::ordered_json to_json(const Coefficients& c) {
  return {{"alpha", c.alpha}, {"beta", c.beta}, {"rho", c.rho}};
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["max_abs"] = r.max_abs;
  j["mean_abs"] = r.mean_abs;
  j["tolerance"] = r.tolerance;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Residual& res : r.residuals) {
    nlohmann::ordered_json row{{"label", res.label}, {"kind", res.kind}, {"value", res.value}};
    if (!res.point.empty()) row["point"] = res.point;
    rows.push_back(std::move(row));
  }
  j["residuals"] = std::move(rows);
  return j;
}

nlohmann::ordered_json to_json(const McEstimate& e) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["stderr"] = e.std_error;
  j["samples_used"] = e.samples_used;
  j["mean_steps"] = e.mean_steps;
  j["truncated_walks"] = e.truncated_walks;
  nlohmann::ordered_json diag = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.diagnostics) diag[k] = v;
  j["diagnostics"] = std::move(diag);
  j["warnings"] = e.warnings;
  return j;
}

}  // namespace binormal
