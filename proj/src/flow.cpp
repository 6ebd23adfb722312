#include "rfa/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rfa {

namespace {

std::array<double, 3> normal_toward(const Mesh& mesh, const Mesh::Facet& f,
                                    const std::array<double, 3>& target) {
  std::array<double, 3> n = mesh.facet_normal(f);
  const std::array<double, 3> fc = mesh.facet_centroid(f);
  const double d =
      n[0] * (target[0] - fc[0]) + n[1] * (target[1] - fc[1]) + n[2] * (target[2] - fc[2]);
  if (d < 0.0)
    for (double& v : n) v = -v;
  return n;
}

}  // namespace

double facet_flux(const Mesh& mesh, const VectorField& u, FacetTag tag) {
  double q = 0.0;
  for (const auto& f : mesh.facets) {
    if (f.tag != tag) continue;
    // normal oriented away from the incident cell
    std::array<double, 3> n = normal_toward(mesh, f, mesh.cell_centroid(f.cell));
    for (double& v : n) v = -v;
    std::array<double, 3> ubar{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) ubar[d] += u.values[f.n[k]][d] / 3.0;
    q += mesh.facet_area(f) * (ubar[0] * n[0] + ubar[1] * n[1] + ubar[2] * n[2]);
  }
  return q;
}

VectorField prescribed_flow(const Mesh& mesh, double u_b, double u_s, double saline_rate) {
  VectorField u(mesh);

  std::vector<char> blood(mesh.num_nodes(), 0);
  std::vector<char> solid(mesh.num_nodes(), 0);  // touches electrode/thermistor/tissue/board
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const bool b = mesh.cell_region[c] == Region::Blood;
    for (int n : mesh.cells[c]) (b ? blood : solid)[n] = 1;
  }

  std::vector<char> noslip(mesh.num_nodes(), 0);
  std::vector<char> hole(mesh.num_nodes(), 0);
  for (const auto& f : mesh.facets) {
    switch (f.tag) {
      case FacetTag::Lateral:
      case FacetTag::TissueBloodInterface:
      case FacetTag::CatheterInsulated:
        for (int n : f.n) noslip[n] = 1;
        break;
      case FacetTag::HoleInlet:
        for (int n : f.n) hole[n] = 1;
        break;
      default:
        break;
    }
  }
  // the carved electrode wall has no facet tag of its own: any blood
  // node shared with a solid region is part of it
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (blood[n] && solid[n]) noslip[n] = 1;

  // the crossflow develops a laminar boundary layer above the tissue
  // surface; without it the wall cooling is wildly overestimated. The
  // catheter body sheds a recirculating wake (Re of a few hundred on
  // the tip diameter), modeled as a Gaussian velocity deficit that
  // recovers over a few diameters downstream.
  const double z_surface = 0.04;
  const double bl = 2e-3;
  const double cx = 0.04, cy = 0.04;
  const double d_tip = 2.33e-3;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (blood[n] && !noslip[n]) {
      const auto& p = mesh.nodes[n];
      double f = std::clamp((p[2] - z_surface) / bl, 0.0, 1.0);
      if (p[0] > cx && p[2] > z_surface) {
        const double sy = (p[1] - cy) / d_tip;
        const double wake =
            0.7 * std::exp(-(p[0] - cx) / (5.0 * d_tip)) * std::exp(-sy * sy);
        f *= 1.0 - wake;
      }
      u.values[n] = {u_b * f, 0.0, 0.0};
    }

  // saline jets: radial from the catheter axis, a few element layers deep
  bool any_hole = false;
  double ax = 0.0, ay = 0.0, area = 0.0;
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::HoleInlet) continue;
    const double a = mesh.facet_area(f);
    const std::array<double, 3> fc = mesh.facet_centroid(f);
    ax += a * fc[0];
    ay += a * fc[1];
    area += a;
    any_hole = true;
  }
  if (any_hole && u_s != 0.0) {
    ax /= area;
    ay /= area;

    // the jets penetrate further when the crossflow is too weak to
    // sweep them away; reach scales with the speed ratio
    const int reach =
        u_b > 0.0 ? std::clamp(static_cast<int>(std::lround(0.5 / u_b)) * 2, 2, 10) : 10;

    std::vector<std::vector<int>> adj(mesh.num_nodes());
    for (int c = 0; c < mesh.num_cells(); ++c) {
      if (mesh.cell_region[c] != Region::Blood) continue;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (a != b) adj[mesh.cells[c][a]].push_back(mesh.cells[c][b]);
    }
    std::vector<int> layer(mesh.num_nodes(), -1);
    std::deque<int> queue;
    for (int n = 0; n < mesh.num_nodes(); ++n)
      if (hole[n]) {
        layer[n] = 0;
        queue.push_back(n);
      }
    while (!queue.empty()) {
      const int n = queue.front();
      queue.pop_front();
      if (layer[n] >= reach) continue;
      for (int m : adj[n])
        if (layer[m] < 0) {
          layer[m] = layer[n] + 1;
          queue.push_back(m);
        }
    }

    // a jet whose momentum is below the crossflow's bends downstream
    // within about a hole diameter; the hole facets themselves stay
    // radial (they set the pump flux), the outer layers blend toward
    // the crossflow by the momentum ratio
    const double w_r = std::abs(u_s) / (std::abs(u_s) + std::abs(u_b) + 1e-300);
    std::vector<int> jet_nodes;
    for (int n = 0; n < mesh.num_nodes(); ++n) {
      if (layer[n] < 0 || (noslip[n] && !hole[n])) continue;
      const double dx = mesh.nodes[n][0] - ax;
      const double dy = mesh.nodes[n][1] - ay;
      const double r = std::hypot(dx, dy);
      if (r < 1e-12) continue;
      double jx = dx / r, jy = dy / r;
      if (layer[n] > 0) {
        jx = w_r * jx + (1.0 - w_r);
        jy = w_r * jy;
        const double jn = std::hypot(jx, jy);
        jx /= jn;
        jy /= jn;
      }
      u.values[n] = {u_s * jx, u_s * jy, 0.0};
      jet_nodes.push_back(n);
    }
    if (saline_rate > 0.0) {
      // the staircased hole facets never match the circular hole area,
      // so rescale the jet so the discrete flux equals the pump rate
      const double q = std::abs(facet_flux(mesh, u, FacetTag::HoleInlet));
      if (q <= 0.0) throw std::runtime_error("prescribed_flow: zero flux through hole facets");
      const double scale = saline_rate / q;
      for (int n : jet_nodes)
        for (double& v : u.values[n]) v *= scale;
    }
  }
  return u;
}

namespace {

struct NsSystem {
  std::vector<int> blood_nodes;   // global node ids
  std::vector<int> local;         // global -> local, -1 outside
  std::vector<int> blood_cells;
  SparseOperator pattern;         // 4 dofs per local node: ux uy uz p
  std::vector<int> bc_dofs;
  std::vector<double> bc_values;
  double h_min = 0.0;
};

NsSystem build_system(const Mesh& mesh, const FlowOptions& opts) {
  NsSystem sys;
  sys.local.assign(mesh.num_nodes(), -1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_region[c] != Region::Blood) continue;
    sys.blood_cells.push_back(c);
    for (int n : mesh.cells[c])
      if (sys.local[n] < 0) {
        sys.local[n] = 0;
        sys.blood_nodes.push_back(n);
      }
  }
  if (sys.blood_cells.empty()) throw std::runtime_error("flow: mesh has no blood cells");
  std::sort(sys.blood_nodes.begin(), sys.blood_nodes.end());
  for (size_t i = 0; i < sys.blood_nodes.size(); ++i) sys.local[sys.blood_nodes[i]] = (int)i;

  const int nl = (int)sys.blood_nodes.size();
  std::vector<std::vector<int>> adj(nl);
  sys.h_min = std::numeric_limits<double>::infinity();
  for (int c : sys.blood_cells) {
    sys.h_min = std::min(sys.h_min, std::cbrt(6.0 * mesh.cell_volume[c]));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) adj[sys.local[mesh.cells[c][a]]].push_back(sys.local[mesh.cells[c][b]]);
  }

  SparseOperator& op = sys.pattern;
  op.n = 4 * nl;
  op.symmetric = false;
  op.row_ptr.assign(op.n + 1, 0);
  std::vector<std::vector<int>> cols(nl);
  for (int i = 0; i < nl; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    cols[i] = a;
  }
  for (int i = 0; i < nl; ++i)
    for (int d = 0; d < 4; ++d) op.row_ptr[4 * i + d + 1] = (int)cols[i].size() * 4;
  for (int r = 0; r < op.n; ++r) op.row_ptr[r + 1] += op.row_ptr[r];
  op.col.resize(op.row_ptr.back());
  op.val.assign(op.row_ptr.back(), 0.0);
  for (int i = 0; i < nl; ++i)
    for (int d = 0; d < 4; ++d) {
      int k = op.row_ptr[4 * i + d];
      for (int j : cols[i])
        for (int e = 0; e < 4; ++e) op.col[k++] = 4 * j + e;
    }

  // boundary conditions on velocity dofs
  double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
  for (int n : sys.blood_nodes) {
    zmin = std::min(zmin, mesh.nodes[n][2]);
    zmax = std::max(zmax, mesh.nodes[n][2]);
  }
  const double height = std::max(zmax - zmin, 1e-12);

  enum Kind : char { Free = 0, Jet = 1, In = 2, SlipY = 3, Wall = 4 };
  std::vector<char> kind(mesh.num_nodes(), Free);
  auto raise = [&](int n, char k) { kind[n] = std::max(kind[n], k); };

  for (const auto& f : mesh.facets) {
    switch (f.tag) {
      case FacetTag::Inflow:
        for (int n : f.n) raise(n, In);
        break;
      case FacetTag::Lateral: {
        char k = Wall;
        if (opts.slip_lateral) {
          const std::array<double, 3> nrm = mesh.facet_normal(f);
          if (std::abs(nrm[1]) > 0.9) k = SlipY;
        }
        for (int n : f.n) raise(n, k);
        break;
      }
      case FacetTag::Bottom:
      case FacetTag::TissueBloodInterface:
      case FacetTag::CatheterInsulated:
        for (int n : f.n) raise(n, Wall);
        break;
      case FacetTag::HoleInlet:
        for (int n : f.n) raise(n, Jet);
        break;
      default:
        break;
    }
  }
  std::vector<char> solid(mesh.num_nodes(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_region[c] != Region::Blood)
      for (int n : mesh.cells[c]) solid[n] = 1;
  for (int n : sys.blood_nodes)
    if (solid[n] && kind[n] != Jet) kind[n] = Wall;

  double ax = 0.0, ay = 0.0, area = 0.0;
  double hole_flux_unit = 0.0;
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::HoleInlet) continue;
    const double a = mesh.facet_area(f);
    const std::array<double, 3> fc = mesh.facet_centroid(f);
    ax += a * fc[0];
    ay += a * fc[1];
    area += a;
  }
  if (area > 0.0) {
    ax /= area;
    ay /= area;
  }
  double u_jet = opts.u_s;
  if (opts.saline_rate > 0.0 && area > 0.0) {
    // unit-speed flux of the nodal Dirichlet field itself, with rim nodes
    // already downgraded to no-slip, so the imposed P1 flux matches the
    // pump rate exactly
    VectorField w(mesh);
    for (int n : sys.blood_nodes) {
      if (kind[n] != Jet) continue;
      const double dx = mesh.nodes[n][0] - ax;
      const double dy = mesh.nodes[n][1] - ay;
      const double r = std::hypot(dx, dy);
      if (r < 1e-12) continue;
      w.values[n] = {dx / r, dy / r, 0.0};
    }
    hole_flux_unit = std::abs(facet_flux(mesh, w, FacetTag::HoleInlet));
    if (hole_flux_unit <= 0.0) throw std::runtime_error("flow: degenerate hole facets");
    u_jet = opts.saline_rate / hole_flux_unit;
  }

  for (int n : sys.blood_nodes) {
    const int i = sys.local[n];
    switch (kind[n]) {
      case Wall:
        for (int d = 0; d < 3; ++d) {
          sys.bc_dofs.push_back(4 * i + d);
          sys.bc_values.push_back(0.0);
        }
        break;
      case SlipY:
        sys.bc_dofs.push_back(4 * i + 1);
        sys.bc_values.push_back(0.0);
        break;
      case In: {
        double ux = opts.u_b;
        if (opts.inflow == FlowOptions::Inflow::ParabolicZ) {
          const double s = (mesh.nodes[n][2] - zmin) / height;
          ux = opts.u_b * 4.0 * s * (1.0 - s);
        }
        sys.bc_dofs.push_back(4 * i + 0);
        sys.bc_values.push_back(ux);
        sys.bc_dofs.push_back(4 * i + 1);
        sys.bc_values.push_back(0.0);
        sys.bc_dofs.push_back(4 * i + 2);
        sys.bc_values.push_back(0.0);
        break;
      }
      case Jet: {
        const double dx = mesh.nodes[n][0] - ax;
        const double dy = mesh.nodes[n][1] - ay;
        const double r = std::hypot(dx, dy);
        const double s = r < 1e-12 ? 0.0 : u_jet / r;
        sys.bc_dofs.push_back(4 * i + 0);
        sys.bc_values.push_back(s * dx);
        sys.bc_dofs.push_back(4 * i + 1);
        sys.bc_values.push_back(s * dy);
        sys.bc_dofs.push_back(4 * i + 2);
        sys.bc_values.push_back(0.0);
        break;
      }
      default:
        break;
    }
  }
  return sys;
}

// One Crank-Nicolson step of the discrete system, Picard-frozen
// convective velocity ubar, returns the stacked (u, p) solution.
std::vector<double> assemble_and_solve(const Mesh& mesh, const NsSystem& sys,
                                       const std::vector<double>& un,
                                       const std::vector<double>& ubar, double dt,
                                       const FlowOptions& opts,
                                       const std::vector<double>* guess) {
  SparseOperator op = sys.pattern;
  std::vector<double> rhs(op.n, 0.0);
  const double theta = 0.5;

  for (int c : sys.blood_cells) {
    const double vol = mesh.cell_volume[c];
    const auto& g = mesh.cell_grad[c];
    int loc[4];
    for (int a = 0; a < 4; ++a) loc[a] = sys.local[mesh.cells[c][a]];

    std::array<double, 3> ue{0.0, 0.0, 0.0};
    for (int a = 0; a < 4; ++a)
      for (int d = 0; d < 3; ++d) ue[d] += 0.25 * ubar[4 * loc[a] + d];
    const double tau = supg_tau(mesh, c, ue, opts.nu);

    double udg[4];
    for (int a = 0; a < 4; ++a)
      udg[a] = ue[0] * g[a][0] + ue[1] * g[a][1] + ue[2] * g[a][2];

    for (int a = 0; a < 4; ++a) {
      const int ia = loc[a];
      for (int b = 0; b < 4; ++b) {
        const int ib = loc[b];
        const double mass = vol * ((a == b) ? 0.1 : 0.05);
        const double supg_mass = tau * udg[a] * vol * 0.25;
        const double conv = udg[b] * vol * 0.25 + tau * udg[a] * udg[b] * vol;
        const double visc =
            opts.nu * vol * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);

        for (int d = 0; d < 3; ++d) {
          // momentum: mass/dt + theta (conv + visc), explicit part to rhs
          double& m = op.coeff(4 * ia + d, 4 * ib + d);
          m += (mass + supg_mass) / dt + theta * (conv + visc);
          rhs[4 * ia + d] +=
              ((mass + supg_mass) / dt - (1.0 - theta) * (conv + visc)) * un[4 * ib + d];
          // pressure gradient, Galerkin and SUPG parts (implicit)
          op.coeff(4 * ia + d, 4 * ib + 3) += -g[a][d] * vol * 0.25 + tau * udg[a] * g[b][d] * vol;
          // continuity: div u plus the PSPG momentum residual
          op.coeff(4 * ia + 3, 4 * ib + d) +=
              g[b][d] * vol * 0.25 + tau * g[a][d] * (vol * 0.25 / dt + udg[b] * vol);
          rhs[4 * ia + 3] += tau * g[a][d] * vol * 0.25 / dt * un[4 * ib + d];
        }
        // PSPG pressure Laplacian
        op.coeff(4 * ia + 3, 4 * ib + 3) +=
            tau * vol * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
      }
    }
  }

  apply_dirichlet(op, rhs, sys.bc_dofs, sys.bc_values);
  SolveOptions sopts;
  sopts.tol = opts.solver_tol;
  sopts.max_iter = 40000;
  return solve_linear(op, rhs, guess, sopts);
}

}  // namespace

FlowState step_flow(FlowState state, const Mesh& mesh, double t_start, double t_end,
                    const FlowOptions& opts) {
  if (!(t_end > t_start)) throw std::invalid_argument("step_flow: empty time window");
  const NsSystem sys = build_system(mesh, opts);
  const int nl = (int)sys.blood_nodes.size();

  if (!state.u.mesh) state.u = VectorField(mesh);
  if (!state.p.mesh) state.p = ScalarField(mesh);

  std::vector<double> un(4 * nl, 0.0);
  for (int i = 0; i < nl; ++i) {
    const int n = sys.blood_nodes[i];
    for (int d = 0; d < 3; ++d) un[4 * i + d] = state.u.values[n][d];
    un[4 * i + 3] = state.p.values[n];
  }
  // the initial state must satisfy the velocity boundary conditions or
  // the first step sees an impulsive start
  for (size_t k = 0; k < sys.bc_dofs.size(); ++k) un[sys.bc_dofs[k]] = sys.bc_values[k];

  double bc_speed = 0.0;
  for (size_t k = 0; k < sys.bc_dofs.size(); ++k)
    bc_speed = std::max(bc_speed, std::abs(sys.bc_values[k]));

  double t = t_start;
  while (t < t_end - 1e-14) {
    double umax = bc_speed;
    for (int i = 0; i < nl; ++i)
      umax = std::max(umax, std::hypot(un[4 * i], un[4 * i + 1], un[4 * i + 2]));
    double dt = umax > 1e-12 ? opts.cfl * sys.h_min / umax : t_end - t;
    dt = std::min(dt, t_end - t);

    std::vector<double> ubar = un;
    std::vector<double> sol;
    std::vector<double> history;
    bool converged = false;
    for (int it = 0; it < opts.max_picard; ++it) {
      sol = assemble_and_solve(mesh, sys, un, ubar, dt, opts, &ubar);
      double diff = 0.0, scale = 0.0;
      for (int i = 0; i < nl; ++i)
        for (int d = 0; d < 3; ++d) {
          diff = std::max(diff, std::abs(sol[4 * i + d] - ubar[4 * i + d]));
          scale = std::max(scale, std::abs(sol[4 * i + d]));
        }
      const double rel = diff / std::max(scale, 1e-30);
      history.push_back(rel);
      ubar = sol;
      if (rel < opts.picard_tol) {
        converged = true;
        break;
      }
    }
    if (!converged && (history.empty() || history.back() > 1e-2)) {
      std::ostringstream msg;
      msg << "step_flow: Picard iteration stalled at t = " << t << " s, residuals:";
      for (double r : history) msg << ' ' << r;
      throw std::runtime_error(msg.str());
    }
    un = std::move(sol);
    t += dt;
  }

  for (int i = 0; i < nl; ++i) {
    const int n = sys.blood_nodes[i];
    for (int d = 0; d < 3; ++d) state.u.values[n][d] = un[4 * i + d];
    state.p.values[n] = un[4 * i + 3];
  }
  state.time = t_end;
  return state;
}

}  // namespace rfa
