#include "doctest.h"
#include "rfa/lesion.hpp"
#include "rfa/mesh.hpp"

#include <cmath>
#include <cstdint>

using namespace rfa;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Lcg {
  std::uint64_t s = 88172645463325252ull;
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return (s >> 11) * 0x1.0p-53;
  }
};

ScalarField radial_field(const Mesh& mesh, const std::array<double, 3>& c, double r0) {
  // T = 100 - 50 r / r0: the 50 degC isotherm is the sphere r = r0
  ScalarField t(mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto& p = mesh.nodes[i];
    const double r = std::sqrt((p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]) +
                               (p[2] - c[2]) * (p[2] - c[2]));
    t.values[i] = 100.0 - 50.0 * r / r0;
  }
  return t;
}

// Divided-difference identity for the sub-level volume fraction of a
// linear function on a simplex, valid for distinct vertex values.
double fraction_identity(const double d[4]) {
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (d[i] <= 0.0) continue;
    double term = d[i] * d[i] * d[i];
    for (int j = 0; j < 4; ++j)
      if (j != i) term /= d[i] - d[j];
    f += term;
  }
  return f;
}

}  // namespace

TEST_CASE("barycentric gradients satisfy the defining property") {
  // grad(lambda_a) . (p_b - p_0) = delta_ab - delta_a0 on a skewed tet
  Mesh mesh;
  mesh.nodes = {{0.1, 0.2, 0.05}, {1.0, 0.1, 0.3}, {0.2, 1.3, 0.1}, {0.4, 0.3, 1.2}};
  mesh.cells = {{0, 1, 2, 3}};
  mesh.cell_region = {Region::Tissue};
  mesh.compute_geometry();
  for (int a = 0; a < 4; ++a)
    for (int b = 1; b < 4; ++b) {
      double dot = 0.0;
      for (int d = 0; d < 3; ++d)
        dot += mesh.cell_grad[0][a][d] * (mesh.nodes[b][d] - mesh.nodes[0][d]);
      const double expect = (a == b ? 1.0 : 0.0) - (a == 0 ? 1.0 : 0.0);
      CHECK(dot == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("trivial fields") {
  Mesh mesh = build_box_mesh(6, 6, 6, 0.02, 0.02, 0.02, Region::Tissue);
  const ScalarField cold(mesh, 37.0);
  const Isosurface none = extract_lesion(cold, mesh);
  CHECK(none.triangles.empty());
  const LesionMetrics m0 = lesion_metrics(none, cold, mesh);
  CHECK(m0.volume == 0.0);
  CHECK(m0.d == 0.0);
  CHECK(m0.surface == 0.0);

  const ScalarField hot(mesh, 60.0);
  const Isosurface all = extract_lesion(hot, mesh);
  double vol = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) vol += all.cell_fraction[c] * mesh.cell_volume[c];
  CHECK(vol == doctest::Approx(0.02 * 0.02 * 0.02).epsilon(1e-12));
  CHECK(all.triangles.empty());  // no internal boundary
}

TEST_CASE("cell fractions match the divided-difference identity") {
  // single random tetrahedron, many random vertex values
  Lcg rng;
  for (int trial = 0; trial < 1000; ++trial) {
    Mesh mesh;
    mesh.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (auto& p : mesh.nodes)
      for (double& v : p) v += 0.3 * (rng.next() - 0.5);
    mesh.cells = {{0, 1, 2, 3}};
    mesh.cell_region = {Region::Tissue};
    mesh.compute_geometry();

    double d[4];
    ScalarField t(mesh);
    for (int i = 0; i < 4; ++i) {
      d[i] = 10.0 * (rng.next() - 0.5);
      if (std::abs(d[i]) < 1e-3) d[i] = 1e-3;  // keep values well separated
      t.values[i] = 50.0 + d[i];
    }
    const Isosurface surf = extract_lesion(t, mesh);
    const double expected = fraction_identity(d);
    CHECK(surf.cell_fraction[0] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("interior sphere volume and divergence-theorem consistency") {
  const double L = 0.02, r0 = 5e-3;
  Mesh mesh = build_box_mesh(32, 32, 32, L, L, L, Region::Tissue);
  const ScalarField t = radial_field(mesh, {L / 2, L / 2, L / 2}, r0);
  const Isosurface surf = extract_lesion(t, mesh);

  double vol = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) vol += surf.cell_fraction[c] * mesh.cell_volume[c];
  const double exact = 4.0 / 3.0 * kPi * r0 * r0 * r0;
  CHECK(vol == doctest::Approx(exact).epsilon(0.02));

  // closed surface: the divergence-theorem volume agrees within 1%
  CHECK(isosurface_volume(surf) == doctest::Approx(vol).epsilon(0.01));
}

TEST_CASE("hemisphere tangent to the surface plane") {
  const double L = 0.02, r0 = 2e-3;
  Mesh mesh = build_box_mesh(56, 56, 56, L, L, L, Region::Tissue);
  const ScalarField t = radial_field(mesh, {L / 2, L / 2, L}, r0);
  const Isosurface surf = extract_lesion(t, mesh);
  LesionConfig cfg;
  cfg.z_ref = L;
  cfg.surface_tag = FacetTag::Lateral;  // box top
  const LesionMetrics m = lesion_metrics(surf, t, mesh, cfg);
  CHECK(m.d == doctest::Approx(2.0).epsilon(0.02));
  CHECK(m.wx == doctest::Approx(4.0).epsilon(0.02));
  CHECK(m.wy == doctest::Approx(4.0).epsilon(0.02));
  CHECK(std::abs(m.dwx) < 0.1);
  CHECK(std::abs(m.dwy) < 0.1);
  CHECK(m.surface == doctest::Approx(kPi * 4.0).epsilon(0.02));
  CHECK(m.volume == doctest::Approx(0.5 * 4.0 / 3.0 * kPi * 8.0).epsilon(0.02));
}

TEST_CASE("buried sphere cap metrics") {
  // center 1 mm below the surface, radius 2 mm
  const double L = 0.02, r0 = 2e-3, depth = 1e-3;
  Mesh mesh = build_box_mesh(40, 40, 40, L, L, L, Region::Tissue);
  const ScalarField t = radial_field(mesh, {L / 2, L / 2, L - depth}, r0);
  const Isosurface surf = extract_lesion(t, mesh);
  LesionConfig cfg;
  cfg.z_ref = L;
  cfg.surface_tag = FacetTag::Lateral;
  const LesionMetrics m = lesion_metrics(surf, t, mesh, cfg);
  CHECK(m.d == doctest::Approx((depth + r0) * 1e3).epsilon(0.02));
  CHECK(m.wx == doctest::Approx(2.0 * r0 * 1e3).epsilon(0.02));
  // surface disk radius^2 = r0^2 - depth^2 = 3 mm^2
  CHECK(m.surface == doctest::Approx(kPi * 3.0).epsilon(0.02));
  CHECK(m.dwx == doctest::Approx(1.0).epsilon(0.06));

  // fully buried: no surface intersection
  const ScalarField tb = radial_field(mesh, {L / 2, L / 2, L - 4e-3}, r0);
  const LesionMetrics mb = lesion_metrics(extract_lesion(tb, mesh), tb, mesh, cfg);
  CHECK(mb.surface == 0.0);
  CHECK(mb.d == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("monotone under nodewise heating") {
  const double L = 0.02;
  Mesh mesh = build_box_mesh(10, 10, 10, L, L, L, Region::Tissue);
  ScalarField ta = radial_field(mesh, {L / 2, L / 2, L / 2}, 4e-3);
  ScalarField tb = ta;
  for (double& v : tb.values) v -= 3.0;
  const Isosurface sa = extract_lesion(ta, mesh);
  const Isosurface sb = extract_lesion(tb, mesh);
  double va = 0.0, vb = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CHECK(sb.cell_fraction[c] <= sa.cell_fraction[c] + 1e-12);
    va += sa.cell_fraction[c] * mesh.cell_volume[c];
    vb += sb.cell_fraction[c] * mesh.cell_volume[c];
  }
  CHECK(vb < va);
}

TEST_CASE("metrics invariant under node reordering") {
  const double L = 0.02;
  Mesh mesh = build_box_mesh(8, 8, 8, L, L, L, Region::Tissue);
  ScalarField t = radial_field(mesh, {L / 2, L / 2, L / 2}, 4e-3);
  LesionConfig cfg;
  cfg.z_ref = L;
  const LesionMetrics m1 = lesion_metrics(extract_lesion(t, mesh), t, mesh, cfg);

  // reverse the node numbering
  Mesh rev = mesh;
  const int nn = mesh.num_nodes();
  for (int i = 0; i < nn; ++i) rev.nodes[i] = mesh.nodes[nn - 1 - i];
  for (auto& c : rev.cells)
    for (int& n : c) n = nn - 1 - n;
  for (auto& f : rev.facets)
    for (int& n : f.n) n = nn - 1 - n;
  rev.compute_geometry();
  ScalarField t2(rev);
  for (int i = 0; i < nn; ++i) t2.values[i] = t.values[nn - 1 - i];
  const LesionMetrics m2 = lesion_metrics(extract_lesion(t2, rev), t2, rev, cfg);
  CHECK(m1.volume == doctest::Approx(m2.volume).epsilon(1e-12));
  CHECK(m1.d == doctest::Approx(m2.d).epsilon(1e-12));
  CHECK(m1.wx == doctest::Approx(m2.wx).epsilon(1e-12));
  CHECK(m1.surface == doctest::Approx(m2.surface).epsilon(1e-12));
}
