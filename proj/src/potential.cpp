#include "rfa/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rfa {

namespace {

// Nodes constrained by the potential boundary conditions: V0 on the
// electrode-top annulus, 0 on the bottom boundary.
void potential_bc(const Mesh& mesh, double v0, std::vector<int>& nodes,
                  std::vector<double>& values) {
  std::vector<char> seen(mesh.num_nodes(), 0);
  auto add = [&](int n, double v) {
    if (!seen[n]) {
      seen[n] = 1;
      nodes.push_back(n);
      values.push_back(v);
    }
  };
  // bottom first: a node on both surfaces would be unphysical anyway
  for (const auto& f : mesh.facets)
    if (f.tag == FacetTag::Bottom)
      for (int n : f.n) add(n, 0.0);
  for (const auto& f : mesh.facets)
    if (f.tag == FacetTag::ElectrodeTop)
      for (int n : f.n) add(n, v0);
}

}  // namespace

std::vector<double> sigma_field(const Mesh& mesh, const MaterialTable& materials,
                                const ScalarField& temperature) {
  std::vector<double> sigma(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Region r = mesh.cell_region[c];
    if (r == Region::Tissue) {
      double t = 0.0;
      for (int a = 0; a < 4; ++a) t += 0.25 * temperature.values[mesh.cells[c][a]];
      sigma[c] = materials.eval_coefficients(r, t).sigma;
    } else {
      sigma[c] = materials.region(r).sigma0;
    }
  }
  return sigma;
}

ScalarField solve_potential(const Mesh& mesh, std::span<const double> sigma, double v0,
                            const ScalarField* guess, double tol) {
  std::vector<int> bc_nodes;
  std::vector<double> bc_values;
  potential_bc(mesh, v0, bc_nodes, bc_values);
  if (bc_nodes.empty()) throw std::runtime_error("potential: no Dirichlet boundary facets");

  ScalarField phi(mesh);
  if (v0 == 0.0) return phi;

  SparseOperator op = assemble_stiffness(mesh, sigma);
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  apply_dirichlet(op, rhs, bc_nodes, bc_values);
  SolveOptions opts;
  opts.tol = tol;
  phi.values = solve_linear(op, rhs, guess ? &guess->values : nullptr, opts);
  return phi;
}

double dissipated_power(const Mesh& mesh, std::span<const double> sigma, const ScalarField& phi,
                        std::optional<Region> filter) {
  const std::vector<std::array<double, 3>> grad = element_gradient(phi);
  std::vector<double> density(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = grad[c];
    density[c] = sigma[c] * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  }
  return integrate(mesh, density, filter);
}

CalibrationResult calibrate_board(const Mesh& mesh, MaterialTable& materials, double total_power,
                                  double impedance_r0, const PowerSplit& split,
                                  double solver_tol) {
  if (!(total_power > 0.0) || !(impedance_r0 > 0.0))
    throw std::invalid_argument("power and impedance must be positive");
  const double v0 = std::sqrt(total_power * impedance_r0);
  const double target = split.P_tissue;
  const double tol_w = 0.01;  // [W]

  ScalarField t37(mesh, 37.0);
  ScalarField phi_prev;
  bool have_prev = false;

  auto tissue_power = [&](double sigma_b, ScalarField& phi_out) {
    materials.set_board_sigma(sigma_b);
    const std::vector<double> sigma = sigma_field(mesh, materials, t37);
    phi_out = solve_potential(mesh, sigma, v0, have_prev ? &phi_prev : nullptr, solver_tol);
    phi_prev = phi_out;
    have_prev = true;
    // the tissue conductivity is sigma_0 at the initial 37 degC state
    return dissipated_power(mesh, sigma, phi_out, Region::Tissue);
  };

  double lo = 1e-4, hi = 10.0;
  ScalarField phi;
  double p_lo = tissue_power(lo, phi);
  double p_hi = tissue_power(hi, phi);
  // tissue power grows with the board conductivity; expand the bracket
  // if the target escapes it
  int expand = 0;
  while (p_lo > target && expand++ < 8) {
    lo /= 10.0;
    p_lo = tissue_power(lo, phi);
  }
  expand = 0;
  while (p_hi < target && expand++ < 8) {
    hi *= 10.0;
    p_hi = tissue_power(hi, phi);
  }
  if (p_lo > target || p_hi < target) {
    std::ostringstream msg;
    msg << "board calibration: target tissue power " << target << " W not bracketed by sigma_b in ["
        << lo << ", " << hi << "] S/m (P_tissue(lo) = " << p_lo << " W, P_tissue(hi) = " << p_hi
        << " W)";
    throw std::runtime_error(msg.str());
  }

  CalibrationResult result;
  result.v0 = v0;
  double mid = std::sqrt(lo * hi);
  double p_mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = std::sqrt(lo * hi);  // conductivities span decades: bisect in log
    p_mid = tissue_power(mid, phi);
    ++result.iterations;
    if (std::abs(p_mid - target) <= tol_w) break;
    if (p_mid < target)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(p_mid - target) > tol_w)
    throw std::runtime_error("board calibration did not reach the 0.01 W tolerance");

  materials.set_board_sigma(mid);
  result.sigma_b = mid;
  result.p_tissue = p_mid;
  const std::vector<double> sigma = sigma_field(mesh, materials, t37);
  result.p0 = dissipated_power(mesh, sigma, phi);
  result.phi = std::move(phi);
  return result;
}

PotentialState rescale_voltage(const Mesh& mesh, PotentialState state,
                               std::span<const double> sigma, double tol) {
  ScalarField phi1 = solve_potential(mesh, sigma, state.v0, &state.phi, tol);
  const double p1 = dissipated_power(mesh, sigma, phi1);
  if (!(p1 > 0.0)) throw std::runtime_error("rescale_voltage: degenerate field with zero power");
  // Rescale unconditionally: lambda is 1 when the power is already
  // balanced, and the constraint then holds exactly at every step.
  const double lambda = std::sqrt(state.p0 / p1);
  for (double& v : phi1.values) v *= lambda;
  state.v0 *= lambda;
  state.phi = std::move(phi1);
  state.p_total = lambda * lambda * p1;
  return state;
}

}  // namespace rfa
