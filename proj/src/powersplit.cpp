#include "rfa/powersplit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfa {

namespace {
const double kPi = std::numbers::pi;

// acos with the argument clamped to [-1, 1]; branch joints of the
// contact-area formula can spill past the interval by rounding.
double clamped_acos(double x) {
  return std::acos(std::clamp(x, -1.0, 1.0));
}
}  // namespace

double CatheterSpec::wetted_area() const {
  return 2.0 * kPi * R * R + 2.0 * kPi * R * (h_e - R) - n_holes * kPi * R_h * R_h;
}

double tissue_contact_area(double h, const CatheterSpec& spec) {
  if (h < 0.0) throw std::domain_error("contact depth must be non-negative");
  const double R = spec.R;
  const double Rh = spec.R_h;
  const int n = spec.n_holes;
  if (h <= R) return 2.0 * kPi * R * h;
  const double base = 2.0 * kPi * R * R + 2.0 * kPi * R * (h - R);
  if (h <= R + Rh) return base - n * Rh * Rh * clamped_acos(1.0 + (R - h) / Rh);
  if (h <= R + 2.0 * Rh)
    return base - n * Rh * Rh * (kPi / 2.0 + clamped_acos(2.0 + (R - h) / Rh));
  return base - n * kPi * Rh * Rh;
}

double blood_contact_area(double A_tissue, const CatheterSpec& spec) {
  const double A_blood = spec.wetted_area() - A_tissue;
  if (A_blood < -1e-15 * spec.wetted_area())
    throw std::invalid_argument("tissue contact area exceeds the wetted electrode area");
  return std::max(A_blood, 0.0);
}

double power_fraction(double A_tissue, double A_blood, double sigma_tissue,
                      double sigma_blood, double total_power, PowerSplit* out) {
  if (A_tissue < 0.0 || A_blood < 0.0) throw std::domain_error("negative contact area");
  if (!(sigma_tissue > 0.0) || !(sigma_blood > 0.0))
    throw std::domain_error("conductivities must be positive");
  const double denom = A_blood * sigma_blood + A_tissue * sigma_tissue;
  if (denom == 0.0) throw std::domain_error("degenerate contact: both areas zero");
  const double alpha = A_tissue * sigma_tissue / denom;
  if (out) {
    out->A_tissue = A_tissue;
    out->A_blood = A_blood;
    out->alpha = alpha;
    out->P_tissue = alpha * total_power;
  }
  return alpha;
}

PowerSplit power_split_at_depth(double h, const CatheterSpec& spec, double sigma_tissue,
                                double sigma_blood, double total_power) {
  PowerSplit split;
  const double At = tissue_contact_area(h, spec);
  const double Ab = blood_contact_area(At, spec);
  power_fraction(At, Ab, sigma_tissue, sigma_blood, total_power, &split);
  return split;
}

}  // namespace rfa
