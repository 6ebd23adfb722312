#include "rfa/lesion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rfa {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return std::abs(det3(sub(b, a), sub(c, a), sub(d, a))) / 6.0;
}

Vec3 lerp_iso(const Vec3& p, const Vec3& q, double dp, double dq) {
  const double denom = dp - dq;
  const double t = std::abs(denom) < 1e-300 ? 0.5 : dp / denom;
  return {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])};
}

// Fraction of a triangle with vertex values d on the d >= 0 side.
double triangle_fraction(double d0, double d1, double d2) {
  const double d[3] = {d0, d1, d2};
  int pos[3], neg[3], np = 0, nn = 0;
  for (int i = 0; i < 3; ++i)
    (d[i] >= 0.0 ? pos[np++] : neg[nn++]) = i;
  if (np == 0) return 0.0;
  if (np == 3) return 1.0;
  if (np == 1) {
    const double a = d[pos[0]];
    double f = 1.0;
    for (int k = 0; k < 2; ++k) {
      const double denom = a - d[neg[k]];
      f *= denom > 1e-300 ? a / denom : 1.0;
    }
    return f;
  }
  const double a = d[neg[0]];
  double f = 1.0;
  for (int k = 0; k < 2; ++k) {
    const double denom = a - d[pos[k]];
    f *= denom < -1e-300 ? a / denom : 1.0;
  }
  return 1.0 - f;
}

}  // namespace

Isosurface extract_lesion(const ScalarField& temperature, const Mesh& mesh, double iso) {
  Isosurface out;
  out.iso = iso;
  out.cell_fraction.assign(mesh.num_cells(), 0.0);

  auto emit = [&](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& inside_ref) {
    // orient away from the enclosed region
    const Vec3 n{(p1[1] - p0[1]) * (p2[2] - p0[2]) - (p1[2] - p0[2]) * (p2[1] - p0[1]),
                 (p1[2] - p0[2]) * (p2[0] - p0[0]) - (p1[0] - p0[0]) * (p2[2] - p0[2]),
                 (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])};
    const Vec3 c{(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0,
                 (p0[2] + p1[2] + p2[2]) / 3.0};
    const double s = n[0] * (c[0] - inside_ref[0]) + n[1] * (c[1] - inside_ref[1]) +
                     n[2] * (c[2] - inside_ref[2]);
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p0);
    if (s >= 0.0) {
      out.vertices.push_back(p1);
      out.vertices.push_back(p2);
    } else {
      out.vertices.push_back(p2);
      out.vertices.push_back(p1);
    }
    out.triangles.push_back({base, base + 1, base + 2});
  };

  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_region[c] != Region::Tissue) continue;
    const auto& cell = mesh.cells[c];
    Vec3 p[4];
    double d[4];
    int pos[4], neg[4], np = 0, nn = 0;
    for (int i = 0; i < 4; ++i) {
      p[i] = mesh.nodes[cell[i]];
      d[i] = temperature.values[cell[i]] - iso;
      (d[i] >= 0.0 ? pos[np++] : neg[nn++]) = i;
    }
    if (np == 0) continue;
    const double vol = mesh.cell_volume[c];
    if (np == 4) {
      out.cell_fraction[c] = 1.0;
      continue;
    }
    if (np == 1) {
      const int a = pos[0];
      Vec3 q[3];
      for (int k = 0; k < 3; ++k) q[k] = lerp_iso(p[a], p[neg[k]], d[a], d[neg[k]]);
      out.cell_fraction[c] = std::clamp(tet_volume(p[a], q[0], q[1], q[2]) / vol, 0.0, 1.0);
      emit(q[0], q[1], q[2], p[a]);
    } else if (np == 3) {
      const int a = neg[0];
      Vec3 q[3];
      for (int k = 0; k < 3; ++k) q[k] = lerp_iso(p[a], p[pos[k]], d[a], d[pos[k]]);
      out.cell_fraction[c] =
          std::clamp(1.0 - tet_volume(p[a], q[0], q[1], q[2]) / vol, 0.0, 1.0);
      const Vec3 ref{(p[pos[0]][0] + p[pos[1]][0] + p[pos[2]][0]) / 3.0,
                     (p[pos[0]][1] + p[pos[1]][1] + p[pos[2]][1]) / 3.0,
                     (p[pos[0]][2] + p[pos[1]][2] + p[pos[2]][2]) / 3.0};
      emit(q[0], q[1], q[2], ref);
    } else {
      // wedge with vertices a, b and the four edge cuts; split into
      // three sub-tets for the volume, two triangles for the surface
      const int a = pos[0], b = pos[1];
      const Vec3 pac = lerp_iso(p[a], p[neg[0]], d[a], d[neg[0]]);
      const Vec3 pad = lerp_iso(p[a], p[neg[1]], d[a], d[neg[1]]);
      const Vec3 pbc = lerp_iso(p[b], p[neg[0]], d[b], d[neg[0]]);
      const Vec3 pbd = lerp_iso(p[b], p[neg[1]], d[b], d[neg[1]]);
      const double wedge = tet_volume(p[a], pac, pad, p[b]) + tet_volume(pac, pad, p[b], pbd) +
                           tet_volume(pac, p[b], pbc, pbd);
      out.cell_fraction[c] = std::clamp(wedge / vol, 0.0, 1.0);
      const Vec3 ref{(p[a][0] + p[b][0]) / 2.0, (p[a][1] + p[b][1]) / 2.0,
                     (p[a][2] + p[b][2]) / 2.0};
      emit(pac, pbc, pbd, ref);
      emit(pac, pbd, pad, ref);
    }
  }
  return out;
}

double isosurface_volume(const Isosurface& surface) {
  double six_v = 0.0;
  for (const auto& t : surface.triangles) {
    const Vec3& a = surface.vertices[t[0]];
    const Vec3& b = surface.vertices[t[1]];
    const Vec3& c = surface.vertices[t[2]];
    six_v += det3(a, b, c);
  }
  return std::abs(six_v) / 6.0;
}

LesionMetrics lesion_metrics(const Isosurface& surface, const ScalarField& temperature,
                             const Mesh& mesh, const LesionConfig& config) {
  LesionMetrics m;

  std::vector<char> tissue(mesh.num_nodes(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_region[c] == Region::Tissue)
      for (int n : mesh.cells[c]) tissue[n] = 1;
  m.t_max = -std::numeric_limits<double>::infinity();
  bool any_tissue = false;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (tissue[n]) {
      any_tissue = true;
      m.t_max = std::max(m.t_max, temperature.values[n]);
    }
  if (!any_tissue) m.t_max = 0.0;

  double volume = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) volume += surface.cell_fraction[c] * mesh.cell_volume[c];
  m.volume = volume * 1e9;

  for (const auto& f : mesh.facets) {
    if (f.tag != config.surface_tag) continue;
    const double frac =
        triangle_fraction(temperature.values[f.n[0]] - surface.iso,
                          temperature.values[f.n[1]] - surface.iso,
                          temperature.values[f.n[2]] - surface.iso);
    if (frac > 0.0) m.surface += frac * mesh.facet_area(f) * 1e6;
  }

  // the lesion hull: isotherm vertices plus hot tissue nodes (the
  // latter cover parts clipped by the tissue boundary)
  std::vector<Vec3> cloud;
  cloud.reserve(surface.vertices.size());
  for (const auto& v : surface.vertices) cloud.push_back(v);
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (tissue[n] && temperature.values[n] >= surface.iso) cloud.push_back(mesh.nodes[n]);
  if (cloud.empty()) {
    if (m.t_max < 0.0) m.t_max = 0.0;
    return m;
  }

  double zmin = cloud[0][2], zmax = cloud[0][2];
  for (const auto& v : cloud) {
    zmin = std::min(zmin, v[2]);
    zmax = std::max(zmax, v[2]);
  }
  m.d = (config.z_ref - zmin) * 1e3;

  const int nb = std::max(config.depth_bins, 1);
  const double dz = std::max(zmax - zmin, 1e-12) / nb;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 4>> ext(nb, {inf, -inf, inf, -inf});  // xmin xmax ymin ymax
  for (const auto& v : cloud) {
    int b = static_cast<int>((v[2] - zmin) / dz);
    b = std::clamp(b, 0, nb - 1);
    ext[b][0] = std::min(ext[b][0], v[0]);
    ext[b][1] = std::max(ext[b][1], v[0]);
    ext[b][2] = std::min(ext[b][2], v[1]);
    ext[b][3] = std::max(ext[b][3], v[1]);
  }
  int bx = -1, by = -1;
  for (int b = 0; b < nb; ++b) {
    if (ext[b][1] < ext[b][0]) continue;
    const double wx = ext[b][1] - ext[b][0];
    const double wy = ext[b][3] - ext[b][2];
    if (wx * 1e3 > m.wx || bx < 0) {
      m.wx = wx * 1e3;
      bx = b;
    }
    if (wy * 1e3 > m.wy || by < 0) {
      m.wy = wy * 1e3;
      by = b;
    }
  }
  if (bx >= 0) m.dwx = (config.z_ref - (zmin + (bx + 0.5) * dz)) * 1e3;
  if (by >= 0) m.dwy = (config.z_ref - (zmin + (by + 0.5) * dz)) * 1e3;
  return m;
}

void write_isosurface_vtk(const Isosurface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# vtk DataFile Version 3.0\nisotherm\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << surface.vertices.size() << " double\n";
  out.precision(17);
  for (const auto& v : surface.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "POLYGONS " << surface.triangles.size() << ' ' << 4 * surface.triangles.size() << '\n';
  for (const auto& t : surface.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace rfa
