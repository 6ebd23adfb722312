#include "doctest.h"
#include "rfa/flow.hpp"
#include "rfa/mesh.hpp"
#include "rfa/params.hpp"
#include "rfa/powersplit.hpp"

#include <cmath>

using namespace rfa;

TEST_CASE("prescribed flow: core, no-slip and exact saline flux") {
  GeometryConfig geo;
  geo.force_gf = 10.0;
  geo.h_min = 4e-4;
  CatheterSpec spec;
  MaterialTable materials;
  const Mesh mesh = build_mesh(geo, spec, materials);

  const double rate = 17.0 * 1e-6 / 60.0;  // 17 mL/min
  const double u_b = 0.5;
  const VectorField u = prescribed_flow(mesh, u_b, 0.24, rate);

  // discrete hole flux matches the pump rate by construction
  CHECK(std::abs(facet_flux(mesh, u, FacetTag::HoleInlet)) == doctest::Approx(rate).epsilon(1e-9));

  // no slip on the tissue interface, uniform crossflow in the far field
  std::vector<char> blood(mesh.num_nodes(), 0), solid(mesh.num_nodes(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int n : mesh.cells[c])
      (mesh.cell_region[c] == Region::Blood ? blood : solid)[n] = 1;
  int far_checked = 0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    if (blood[n] && solid[n]) {
      const double mag = std::hypot(u.values[n][0], u.values[n][1], u.values[n][2]);
      // interface nodes are either no-slip or saline inlets
      if (mag > 0.0) CHECK(mag < 5.0);
    }
    if (blood[n] && !solid[n]) {
      const auto& p = mesh.nodes[n];
      const double dx = p[0] - 0.04, dy = p[1] - 0.04;
      const bool on_wall = p[0] < 1e-9 || p[0] > 0.08 - 1e-9 || p[1] < 1e-9 ||
                           p[1] > 0.08 - 1e-9 || p[2] > 0.08 - 1e-9;
      // upstream of the catheter; downstream carries the wake deficit
      if (!on_wall && p[0] < 0.038 && std::hypot(dx, dy) > 0.02 && p[2] > 0.045 &&
          p[2] < 0.075) {
        CHECK(u.values[n][0] == u_b);
        CHECK(u.values[n][1] == 0.0);
        ++far_checked;
      }
    }
  }
  CHECK(far_checked > 100);

  // outside tissue and board: zero velocity
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (!blood[n])
      CHECK(std::hypot(u.values[n][0], u.values[n][1], u.values[n][2]) == 0.0);
}

TEST_CASE("Navier-Stokes plane channel holds the Poiseuille profile") {
  // channel between z walls, free-slip y walls, parabolic inflow
  const double lx = 0.03, ly = 0.01, H = 0.01;
  Mesh mesh = build_box_mesh(12, 4, 8, lx, ly, H, Region::Blood);
  FlowOptions opts;
  opts.u_b = 0.05;  // peak speed, Re ~ 200
  opts.u_s = 0.0;
  opts.inflow = FlowOptions::Inflow::ParabolicZ;
  opts.slip_lateral = true;
  opts.nu = 2.52e-6;
  opts.picard_tol = 1e-6;

  FlowState state;
  state.u = VectorField(mesh);
  state.p = ScalarField(mesh);
  // start from the analytic profile; the discrete steady state must stay
  // beside it
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const double s = mesh.nodes[n][2] / H;
    state.u.values[n] = {opts.u_b * 4.0 * s * (1.0 - s), 0.0, 0.0};
  }
  state = step_flow(state, mesh, 0.0, 0.3, opts);

  // centerline within 5% of the analytic peak
  int checked = 0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto& p = mesh.nodes[n];
    if (std::abs(p[2] - H / 2) < 1e-12 && p[0] > 0.012 && p[0] < 0.022) {
      CHECK(state.u.values[n][0] == doctest::Approx(opts.u_b).epsilon(0.05));
      CHECK(std::abs(state.u.values[n][2]) < 0.05 * opts.u_b);
      ++checked;
    }
  }
  CHECK(checked >= 3);

  // inflow/outflow mass balance within 0.5%
  const double q_in = facet_flux(mesh, state.u, FacetTag::Inflow);
  const double q_out = facet_flux(mesh, state.u, FacetTag::Outflow);
  CHECK(std::abs(q_in + q_out) < 0.005 * std::abs(q_in));
  // and the flux carries the analytic mean speed (2/3 of peak)
  CHECK(std::abs(q_in) ==
        doctest::Approx(2.0 / 3.0 * opts.u_b * ly * H).epsilon(0.05));
}

TEST_CASE("step_flow rejects an empty window") {
  Mesh mesh = build_box_mesh(2, 2, 2, 0.01, 0.01, 0.01, Region::Blood);
  FlowState state;
  CHECK_THROWS(step_flow(state, mesh, 1.0, 1.0, {}));
}
