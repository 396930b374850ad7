#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "filmheat/error.hpp"

namespace filmheat {

/// Averaged heat-transfer closures.
enum class ThermalModel { theta, theta_phi, scheid, lin_truncated };

/// Saint-Venant closures for (h, q).
enum class HydroModel { vila, ruyer_quil };

inline std::string to_string(ThermalModel m) {
  switch (m) {
    case ThermalModel::theta: return "theta";
    case ThermalModel::theta_phi: return "theta-phi";
    case ThermalModel::scheid: return "scheid";
    case ThermalModel::lin_truncated: return "lin";
  }
  return "?";
}

inline std::string to_string(HydroModel m) {
  return m == HydroModel::vila ? "vila" : "ruyer-quil";
}

inline ThermalModel parse_thermal_model(std::string_view s) {
  if (s == "theta") return ThermalModel::theta;
  if (s == "theta-phi" || s == "theta_phi") return ThermalModel::theta_phi;
  if (s == "scheid") return ThermalModel::scheid;
  if (s == "lin" || s == "lin-truncated") return ThermalModel::lin_truncated;
  throw UsageError("unknown thermal model '" + std::string(s) + "'");
}

inline HydroModel parse_hydro_model(std::string_view s) {
  if (s == "vila") return HydroModel::vila;
  if (s == "ruyer-quil" || s == "ruyer_quil" || s == "ruyerquil") return HydroModel::ruyer_quil;
  throw UsageError("unknown hydrodynamic model '" + std::string(s) + "'");
}

inline std::vector<ThermalModel> all_thermal_models() {
  return {ThermalModel::theta, ThermalModel::theta_phi, ThermalModel::scheid,
          ThermalModel::lin_truncated};
}

}  // namespace filmheat
