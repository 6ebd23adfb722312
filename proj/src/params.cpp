#include "rfa/params.hpp"

#include <cmath>
#include <stdexcept>

namespace rfa {

std::string_view region_name(Region r) {
  switch (r) {
    case Region::Blood: return "blood";
    case Region::Tissue: return "tissue";
    case Region::Board: return "board";
    case Region::Electrode: return "electrode";
    case Region::Thermistor: return "thermistor";
  }
  throw std::invalid_argument("unknown region id");
}

MaterialTable::MaterialTable() {
  RegionParams blood;
  blood.rho = 1050.0;
  blood.c0 = 3617.0;
  blood.k0 = 0.52;
  blood.sigma0 = 0.748;
  blood.kinematic_viscosity = 2.52e-6;

  RegionParams tissue;
  tissue.rho = 1076.0;
  tissue.c0 = 3017.0;
  tissue.k0 = 0.518;
  tissue.sigma0 = 0.54;
  tissue.poisson = 0.499;
  tissue.young = 75e3;

  RegionParams board = tissue;  // thermal state equals the initial tissue state
  board.poisson = 0.0;
  board.young = 0.0;
  board.sigma0 = 0.5;  // placeholder until calibrated

  RegionParams electrode;
  electrode.rho = 21500.0;
  electrode.c0 = 132.0;
  electrode.k0 = 71.0;
  electrode.sigma0 = 4.6e6;

  RegionParams thermistor;
  thermistor.rho = 32.0;
  thermistor.c0 = 835.0;
  thermistor.k0 = 0.038;
  thermistor.sigma0 = 1e-5;

  regions_[static_cast<int>(Region::Blood)] = blood;
  regions_[static_cast<int>(Region::Tissue)] = tissue;
  regions_[static_cast<int>(Region::Board)] = board;
  regions_[static_cast<int>(Region::Electrode)] = electrode;
  regions_[static_cast<int>(Region::Thermistor)] = thermistor;
}

Coefficients MaterialTable::eval_coefficients(Region r, double t_celsius) const {
  if (!std::isfinite(t_celsius)) throw std::invalid_argument("non-finite temperature");
  const int idx = static_cast<int>(r);
  if (idx < 0 || idx >= kNumRegions) throw std::invalid_argument("unknown region id");
  const RegionParams& p = regions_[idx];
  if (r != Region::Tissue) return {p.c0, p.k0, p.sigma0};
  const double dt = t_celsius - laws_.t_ref;
  const double floor = 0.01;
  auto law = [&](double v0, double slope) {
    return v0 * std::max(floor, 1.0 + slope * dt);
  };
  return {law(p.c0, laws_.c_slope), law(p.k0, laws_.k_slope), law(p.sigma0, laws_.sigma_slope)};
}

double grams_force_to_newtons(double grams_force) {
  if (grams_force < 0.0) throw std::domain_error("negative force");
  return grams_force * 9.80665e-3;
}

}  // namespace rfa
