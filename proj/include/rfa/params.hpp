// Physical constants, temperature-dependent coefficient laws and unit
// conversions. Every solver reads its material data from here.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace rfa {

enum class Region : std::uint8_t { Blood = 0, Tissue, Board, Electrode, Thermistor };
inline constexpr int kNumRegions = 5;

std::string_view region_name(Region r);

// Per-region physical constants. Reference temperature for the
// temperature-dependent tissue laws is 37 degC.
struct RegionParams {
  double rho = 0.0;     // density [kg/m^3]
  double c0 = 0.0;      // specific heat at 37 degC [J/kg/K]
  double k0 = 0.0;      // thermal conductivity at 37 degC [W/m/K]
  double sigma0 = 0.0;  // electrical conductivity at 37 degC [S/m]
  double kinematic_viscosity = 0.0;  // [m^2/s], blood only
  double poisson = 0.0;              // [-], tissue only
  double young = 0.0;                // [Pa], tissue only
};

// Linear temperature laws for the tissue coefficients. All other regions
// use their 37 degC constants at every temperature.
struct CoefficientLaws {
  double c_slope = -0.0042;     // [1/K]
  double k_slope = -0.0005;     // [1/K]
  double sigma_slope = 0.015;   // [1/K]
  double t_ref = 37.0;          // [degC]
};

struct Coefficients {
  double c;      // [J/kg/K]
  double k;      // [W/m/K]
  double sigma;  // [S/m]
};

class MaterialTable {
 public:
  // Literature defaults for blood, tissue, electrode and thermistor.
  // The board inherits the initial tissue thermal state; its electrical
  // conductivity is a calibration output (see potential::calibrate_board)
  // and starts from a placeholder value.
  MaterialTable();

  const RegionParams& region(Region r) const { return regions_[static_cast<int>(r)]; }
  RegionParams& region(Region r) { return regions_[static_cast<int>(r)]; }
  const CoefficientLaws& laws() const { return laws_; }

  void set_board_sigma(double sigma_b) { regions_[static_cast<int>(Region::Board)].sigma0 = sigma_b; }
  double board_sigma() const { return region(Region::Board).sigma0; }

  // Evaluates (c, k, sigma) at temperature T [degC]. Tissue follows the
  // linear laws, clamped at 1% of the 37 degC value so extreme
  // extrapolation cannot flip signs; every other region is constant.
  Coefficients eval_coefficients(Region r, double t_celsius) const;

 private:
  std::array<RegionParams, kNumRegions> regions_;
  CoefficientLaws laws_;
};

// Converts a force quoted in grams-force to newtons (standard gravity).
// Throws std::domain_error for negative input.
double grams_force_to_newtons(double grams_force);

}  // namespace rfa
