#include "rfa/bioheat.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rfa {

void thermal_coefficients(const Mesh& mesh, const MaterialTable& materials,
                          const ScalarField& temperature, std::vector<double>& rho_c,
                          std::vector<double>& conductivity) {
  rho_c.resize(mesh.num_cells());
  conductivity.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Region r = mesh.cell_region[c];
    double t = 0.0;
    for (int a = 0; a < 4; ++a) t += 0.25 * temperature.values[mesh.cells[c][a]];
    const Coefficients coeffs = materials.eval_coefficients(r, t);
    rho_c[c] = materials.region(r).rho * coeffs.c;
    conductivity[c] = coeffs.k;
  }
}

std::vector<double> joule_source(const Mesh& mesh, std::span<const double> sigma,
                                 const ScalarField& phi) {
  const std::vector<std::array<double, 3>> grad = element_gradient(phi);
  std::vector<double> q(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = grad[c];
    q[c] = sigma[c] * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  }
  return q;
}

namespace {

void init_workspace(const Mesh& mesh, const BioheatOptions& opts, BioheatWorkspace& ws) {
  ws.pattern = make_pattern(mesh);
  ws.tissue_node.assign(mesh.num_nodes(), 0);
  ws.blood_incident_node.assign(mesh.num_nodes(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_region[c] == Region::Tissue)
      for (int n : mesh.cells[c]) ws.tissue_node[n] = 1;
    if (mesh.cell_region[c] == Region::Blood)
      for (int n : mesh.cells[c]) ws.blood_incident_node[n] = 1;
  }
  std::vector<char> seen(mesh.num_nodes(), 0);
  auto add = [&](int n, double v) {
    if (!seen[n]) {
      seen[n] = 1;
      ws.bc_nodes.push_back(n);
      ws.bc_values.push_back(v);
    }
  };
  for (const auto& f : mesh.facets) {
    switch (f.tag) {
      case FacetTag::Inflow:
      case FacetTag::Outflow:
      case FacetTag::Bottom:
      case FacetTag::Lateral:
        for (int n : f.n) add(n, opts.wall_temperature);
        break;
      case FacetTag::HoleInlet:
        for (int n : f.n) add(n, opts.saline_temperature);
        break;
      default:
        break;
    }
  }
  ws.ready = true;
}

}  // namespace

ThermalState step_bioheat(const ThermalState& state, const Mesh& mesh,
                          const MaterialTable& materials, const VectorField& velocity,
                          std::span<const double> cell_source, double dt,
                          const BioheatOptions& opts, BioheatWorkspace* workspace) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  BioheatWorkspace local;
  BioheatWorkspace& ws = workspace ? *workspace : local;
  if (!ws.ready) init_workspace(mesh, opts, ws);

  // velocity restricted to the blood region
  VectorField u(mesh);
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (ws.blood_incident_node[n]) u.values[n] = velocity.values[n];

  std::vector<double> rho_c, conductivity;
  thermal_coefficients(mesh, materials, state.temperature, rho_c, conductivity);
  std::vector<double> reaction(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) reaction[c] = rho_c[c] / dt;

  SparseOperator a_full = ws.pattern;
  SparseOperator a_adv = ws.pattern;
  assemble_advection_supg(mesh, u, rho_c, conductivity, reaction, a_full);
  assemble_advection_supg(mesh, u, rho_c, conductivity, {}, a_adv);
  SparseOperator reaction_op = a_full;  // reaction + SUPG-weighted mass part
  reaction_op.axpy_into(a_adv, -1.0);
  assemble_stiffness(mesh, conductivity, a_full);
  a_full.symmetric = false;

  std::vector<double> rhs =
      supg_source_vector(mesh, u, rho_c, conductivity, cell_source);
  std::vector<double> mass_term(mesh.num_nodes());
  reaction_op.multiply(state.temperature.values, mass_term);
  for (int i = 0; i < mesh.num_nodes(); ++i) rhs[i] += mass_term[i];

  apply_dirichlet(a_full, rhs, ws.bc_nodes, ws.bc_values);

  ThermalState next;
  next.temperature.mesh = &mesh;
  SolveOptions sopts;
  sopts.tol = opts.solver_tol;
  next.temperature.values =
      solve_linear(a_full, rhs, &state.temperature.values, sopts);
  next.time = state.time + dt;
  next.pop = state.pop;

  next.max_tissue_t = -std::numeric_limits<double>::infinity();
  next.max_blood_t = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const double t = next.temperature.values[n];
    if (!std::isfinite(t)) {
      std::ostringstream msg;
      msg << "bioheat: non-finite temperature at node " << n << ", t = " << next.time << " s";
      throw std::runtime_error(msg.str());
    }
    if (ws.tissue_node[n] && t > next.max_tissue_t) next.max_tissue_t = t;
    if (ws.blood_incident_node[n] && t > next.max_blood_t) next.max_blood_t = t;
  }
  next.blood_above_80 = state.blood_above_80 || next.max_blood_t >= 80.0;
  if (!next.pop && next.max_tissue_t >= opts.pop_threshold)
    next.pop = detect_pop(next, mesh, opts.pop_threshold);
  return next;
}

std::optional<PopEvent> detect_pop(const ThermalState& state, const Mesh& mesh,
                                   double threshold) {
  std::vector<char> tissue(mesh.num_nodes(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_region[c] == Region::Tissue)
      for (int n : mesh.cells[c]) tissue[n] = 1;
  PopEvent ev;
  ev.time = state.time;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    if (!tissue[n]) continue;
    const double t = state.temperature.values[n];
    if (t >= threshold && t > ev.t_max) {
      ev.t_max = t;
      ev.node = n;
    }
  }
  if (ev.node < 0) return std::nullopt;
  return ev;
}

}  // namespace rfa
