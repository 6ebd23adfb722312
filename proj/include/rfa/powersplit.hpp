// Electrode-tissue and electrode-blood contact areas for the
// hemispherical-tip 6-hole irrigated electrode, and the resulting split
// of the generator power between tissue and blood.
#pragma once

namespace rfa {

struct CatheterSpec {
  double R = 1.165e-3;                  // tip radius [m] (electrode diameter 2.33 mm)
  double h_e = 3.5e-3;                  // electrode length [m]
  double R_h = 0.25e-3;                 // irrigation hole radius [m]
  int n_holes = 6;
  double thermistor_diameter = 1.54e-3; // [m]
  double thermistor_length = 3.0e-3;    // [m]
  double channel_diameter = 0.73e-3;    // [m]

  // Total wetted electrode area: hemispherical cap + cylindrical band
  // minus the six hole disks.
  double wetted_area() const;
};

struct PowerSplit {
  double A_tissue = 0.0;  // [m^2]
  double A_blood = 0.0;   // [m^2]
  double alpha = 0.0;     // tissue power fraction [-]
  double P_tissue = 0.0;  // [W]
};

// Electrode surface area wetted by tissue at contact depth h. Piecewise
// in h: spherical band for h <= R, then hole-segment corrections while
// the contact line crosses the hole band [R, R+2R_h], then the full
// wetted area growth with all six hole disks removed. Continuous across
// the branch joints. Throws std::domain_error for h < 0.
double tissue_contact_area(double h, const CatheterSpec& spec);

// Remaining wetted area, wetted_area() - A_tissue. Throws on a negative
// result (inconsistent inputs).
double blood_contact_area(double A_tissue, const CatheterSpec& spec);

// Conductivity-weighted power split:
//   alpha = A_t sigma_t / (A_b sigma_b + A_t sigma_t),  P_tissue = alpha P.
double power_fraction(double A_tissue, double A_blood, double sigma_tissue,
                      double sigma_blood, double total_power, PowerSplit* out = nullptr);

// Convenience: full split for a given contact depth.
PowerSplit power_split_at_depth(double h, const CatheterSpec& spec, double sigma_tissue,
                                double sigma_blood, double total_power);

}  // namespace rfa
