#pragma once
// JSON records for estimator outputs. Key order is insertion order
// (ordered_json) so serialized reports are byte-stable.

#include <string>

#include <json.hpp>

#include "ggbm/estimators.hpp"
#include "ggbm/norms.hpp"
#include "ggbm/version.hpp"

namespace ggbm {

using json = nlohmann::ordered_json;

inline json to_json(const MCEstimate& e) {
  json j;
  j["value"] = e.value;
  j["stderr"] = e.std_error;
  j["n_samples"] = e.n_samples;
  j["seed"] = e.seed;
  if (e.unreliable) j["unreliable"] = true;
  return j;
}

inline json to_json(const NormSpec& norm) {
  json j;
  j["name"] = norm.name();
  j["theta_provenance"] = to_string(norm.theta_provenance());
  return j;
}

inline json to_json(const MomentTable& t) {
  json j;
  j["hurst"] = t.hurst;
  j["norm"] = to_json(t.norm);
  j["excluded"] = t.excluded;
  json entries = json::object();
  for (const auto& [k, e] : t.entries) entries[std::to_string(k)] = to_json(e);
  j["eta"] = entries;
  return j;
}

inline json to_json(const SeriesExpansion& s) {
  json j;
  j["beta"] = s.beta;
  j["order"] = s.order;
  j["theta"] = s.theta;
  j["validity"] = s.validity == SeriesExpansion::Validity::SeriesValid
                      ? "SeriesValid"
                      : "LeadingOnly";
  j["coefficients"] = s.coeffs;
  j["coefficient_stderr"] = s.coeff_errs;
  return j;
}

inline json to_json(const TailFit& f) {
  json j;
  j["beta"] = f.beta;
  j["fitted_exponent"] = f.fitted_exponent;
  j["target_exponent"] = f.target_exponent;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  j["n_points"] = f.y_grid.size();
  j["y_grid"] = f.y_grid;
  j["log_neg_log_p"] = f.log_neg_log_p;
  return j;
}

}  // namespace ggbm
