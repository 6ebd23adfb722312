// Temperature advance: backward Euler with SUPG-stabilized advection,
// coefficients linearized at the previous step, Joule source from the
// potential field.
#pragma once

#include <optional>
#include <span>

#include "rfa/femcore.hpp"
#include "rfa/potential.hpp"

namespace rfa {

struct PopEvent {
  double time = 0.0;   // [s]
  int node = -1;       // first tissue node at or above 100 degC
  double t_max = 0.0;  // [degC]
};

struct ThermalState {
  ScalarField temperature;  // [degC]
  double time = 0.0;        // [s]
  double max_tissue_t = 37.0;
  double max_blood_t = 37.0;
  bool blood_above_80 = false;  // coagulum diagnostic
  std::optional<PopEvent> pop;
};

struct BioheatOptions {
  double wall_temperature = 37.0;    // Dirichlet on the outer box walls [degC]
  double saline_temperature = 37.0;  // Dirichlet on the hole inlet facets [degC]
  double pop_threshold = 100.0;      // [degC]
  double solver_tol = 1e-10;
};

// Helper shared with the pipeline: per-cell rho*c and k at the
// cell-average temperature of the previous step.
void thermal_coefficients(const Mesh& mesh, const MaterialTable& materials,
                          const ScalarField& temperature, std::vector<double>& rho_c,
                          std::vector<double>& conductivity);

// Per-cell Joule source sigma(T^n) |grad phi^{n+1}|^2 [W/m^3].
std::vector<double> joule_source(const Mesh& mesh, std::span<const double> sigma,
                                 const ScalarField& phi);

// Reusable scratch state for repeated stepping on a fixed mesh: the
// sparsity pattern, boundary node lists and the tissue node mask.
struct BioheatWorkspace {
  SparseOperator pattern;
  std::vector<char> tissue_node;
  std::vector<char> blood_incident_node;
  std::vector<int> bc_nodes;
  std::vector<double> bc_values;
  bool ready = false;
};

// One backward Euler step of
//   rho c(T^n) (T^{n+1} - T^n)/dt + rho c(T^n) u . grad T^{n+1}
//     - div(k(T^n) grad T^{n+1}) = q
// with T = wall_temperature on the outer box walls, saline Dirichlet on
// the hole facets and zero heat flux on the insulated catheter surface.
// The velocity is taken as zero outside the blood region.
ThermalState step_bioheat(const ThermalState& state, const Mesh& mesh,
                          const MaterialTable& materials, const VectorField& velocity,
                          std::span<const double> cell_source, double dt,
                          const BioheatOptions& opts = {}, BioheatWorkspace* workspace = nullptr);

// First tissue node at or above the pop threshold, if any.
std::optional<PopEvent> detect_pop(const ThermalState& state, const Mesh& mesh,
                                   double threshold = 100.0);

}  // namespace rfa
