// Velocity field in the blood chamber: either a stabilized
// incompressible Navier-Stokes solve (P1-P1, Crank-Nicolson, Picard)
// or a prescribed-flow field for fast desk runs.
#pragma once

#include "rfa/femcore.hpp"

namespace rfa {

struct FlowState {
  VectorField u;   // [m/s]
  ScalarField p;   // kinematic pressure [m^2/s^2]
  double time = 0.0;
};

struct FlowOptions {
  double u_b = 0.5;              // blood inflow speed [m/s]
  double u_s = 0.24;             // saline hole speed [m/s]
  double saline_rate = -1.0;     // [m^3/s]; when positive, the hole speed is
                                 // scaled so the discrete hole flux matches it
  double nu = 2.52e-6;           // kinematic viscosity [m^2/s]
  double cfl = 0.5;
  double picard_tol = 1e-6;      // relative velocity increment
  int max_picard = 50;
  double solver_tol = 1e-8;

  enum class Inflow { Uniform, ParabolicZ };
  Inflow inflow = Inflow::Uniform;
  // Constrain only u_y on the y walls (symmetry); used by the plane
  // channel benchmark. The simulation box uses full no-slip.
  bool slip_lateral = false;
};

// Desk-scale velocity field: crossflow (u_b, 0, 0) in the blood region
// ramped across a laminar boundary layer above the tissue surface, zero
// on no-slip boundaries, and radial saline jets of magnitude u_s within
// two element layers of each irrigation hole.
VectorField prescribed_flow(const Mesh& mesh, double u_b, double u_s, double saline_rate = -1.0);

// Advances the Navier-Stokes solution from t_start to t_end with inner
// steps dt = cfl * h_min / max|u|, Crank-Nicolson in time and Picard
// iteration on the convective term; equal-order P1-P1 with
// pressure-Poisson (GLS) stabilization.
FlowState step_flow(FlowState state, const Mesh& mesh, double t_start, double t_end,
                    const FlowOptions& opts);

// Volumetric flux of u through all facets with the given tag [m^3/s],
// taken along the facet normal oriented away from the incident cell.
double facet_flux(const Mesh& mesh, const VectorField& u, FacetTag tag);

}  // namespace rfa
