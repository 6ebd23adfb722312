// Quasi-static electric potential: Dirichlet solves, dissipated power,
// board-conductivity calibration and the per-step voltage rescaling that
// keeps the total dissipated power constant.
#pragma once

#include <optional>
#include <span>

#include "rfa/femcore.hpp"
#include "rfa/powersplit.hpp"

namespace rfa {

struct PotentialState {
  ScalarField phi;        // [V]
  double v0 = 0.0;        // electrode-top voltage [V]
  double p0 = 0.0;        // reference total power recorded at t = 0 [W]
  double p_total = 0.0;   // total dissipated power of phi [W]
  double sigma_b = 0.0;   // calibrated board conductivity [S/m]
};

// Per-cell sigma(T) for the whole mesh, tissue evaluated with the
// linear law at the cell-average temperature.
std::vector<double> sigma_field(const Mesh& mesh, const MaterialTable& materials,
                                const ScalarField& temperature);

// Solves div(sigma grad phi) = 0 with phi = v0 on electrode_top facets,
// phi = 0 on the bottom boundary and homogeneous Neumann elsewhere.
ScalarField solve_potential(const Mesh& mesh, std::span<const double> sigma, double v0,
                            const ScalarField* guess = nullptr, double tol = 1e-10);

// \int_region sigma |grad phi|^2 dx. Empty filter integrates over the
// whole domain.
double dissipated_power(const Mesh& mesh, std::span<const double> sigma, const ScalarField& phi,
                        std::optional<Region> filter = std::nullopt);

struct CalibrationResult {
  double sigma_b = 0.0;     // [S/m]
  double v0 = 0.0;          // sqrt(P R0) [V]
  double p_tissue = 0.0;    // achieved tissue power [W]
  double p0 = 0.0;          // total power in the domain at calibration [W]
  ScalarField phi;          // potential at the calibrated state
  int iterations = 0;
};

// Bisection on the board conductivity until the tissue power matches
// the target alpha P within 0.01 W, at fixed V0 = sqrt(P R0). The
// returned sigma_b is kept constant for the rest of the run.
CalibrationResult calibrate_board(const Mesh& mesh, MaterialTable& materials, double total_power,
                                  double impedance_r0, const PowerSplit& split,
                                  double solver_tol = 1e-10);

// One constant-power control step: solve with the previous V0, then
// rescale the field and V0 by lambda = sqrt(p0 / p1) so the total
// dissipated power returns to p0 exactly (lambda = 1 when balanced).
PotentialState rescale_voltage(const Mesh& mesh, PotentialState state,
                               std::span<const double> sigma, double tol = 1e-10);

}  // namespace rfa
