#include "rfa/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rfa {

namespace {
const double kPi = std::numbers::pi;
constexpr double kDegenerateVolume = 1e-18;
}  // namespace

std::string_view facet_tag_name(FacetTag t) {
  switch (t) {
    case FacetTag::Inflow: return "inflow";
    case FacetTag::Outflow: return "outflow";
    case FacetTag::Bottom: return "bottom";
    case FacetTag::Lateral: return "lateral";
    case FacetTag::ElectrodeTop: return "electrode_top";
    case FacetTag::HoleInlet: return "hole_inlet";
    case FacetTag::CatheterInsulated: return "catheter_insulated";
    case FacetTag::TissueBloodInterface: return "tissue_blood_interface";
  }
  return "?";
}

std::array<double, 3> Mesh::cell_centroid(int c) const {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int a = 0; a < 4; ++a)
    for (int d = 0; d < 3; ++d) p[d] += 0.25 * nodes[cells[c][a]][d];
  return p;
}

double Mesh::facet_area(const Facet& f) const {
  const auto& p0 = nodes[f.n[0]];
  const auto& p1 = nodes[f.n[1]];
  const auto& p2 = nodes[f.n[2]];
  const double ux = p1[0] - p0[0], uy = p1[1] - p0[1], uz = p1[2] - p0[2];
  const double vx = p2[0] - p0[0], vy = p2[1] - p0[1], vz = p2[2] - p0[2];
  const double cx = uy * vz - uz * vy;
  const double cy = uz * vx - ux * vz;
  const double cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

std::array<double, 3> Mesh::facet_normal(const Facet& f) const {
  const auto& p0 = nodes[f.n[0]];
  const auto& p1 = nodes[f.n[1]];
  const auto& p2 = nodes[f.n[2]];
  const double ux = p1[0] - p0[0], uy = p1[1] - p0[1], uz = p1[2] - p0[2];
  const double vx = p2[0] - p0[0], vy = p2[1] - p0[1], vz = p2[2] - p0[2];
  std::array<double, 3> nvec{uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
  const double len = std::sqrt(nvec[0] * nvec[0] + nvec[1] * nvec[1] + nvec[2] * nvec[2]);
  if (len > 0.0)
    for (double& v : nvec) v /= len;
  return nvec;
}

std::array<double, 3> Mesh::facet_centroid(const Facet& f) const {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a)
    for (int d = 0; d < 3; ++d) p[d] += nodes[f.n[a]][d] / 3.0;
  return p;
}

void Mesh::compute_geometry() {
  const int nc = num_cells();
  cell_volume.assign(nc, 0.0);
  cell_grad.assign(nc, {});
  for (int c = 0; c < nc; ++c) {
    const auto& cell = cells[c];
    const auto& p0 = nodes[cell[0]];
    double e[3][3];
    for (int a = 0; a < 3; ++a)
      for (int d = 0; d < 3; ++d) e[a][d] = nodes[cell[a + 1]][d] - p0[d];
    const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                       e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                       e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
    const double vol = det / 6.0;
    if (!(vol > kDegenerateVolume)) {
      std::ostringstream msg;
      msg << "mesh-quality error: cell " << c << " volume " << vol;
      throw std::runtime_error(msg.str());
    }
    cell_volume[c] = vol;
    // rows of inverse(E)^T are the gradients of the barycentric
    // coordinates lambda_1..lambda_3
    double inv[3][3];
    inv[0][0] = (e[1][1] * e[2][2] - e[1][2] * e[2][1]) / det;
    inv[0][1] = (e[0][2] * e[2][1] - e[0][1] * e[2][2]) / det;
    inv[0][2] = (e[0][1] * e[1][2] - e[0][2] * e[1][1]) / det;
    inv[1][0] = (e[1][2] * e[2][0] - e[1][0] * e[2][2]) / det;
    inv[1][1] = (e[0][0] * e[2][2] - e[0][2] * e[2][0]) / det;
    inv[1][2] = (e[0][2] * e[1][0] - e[0][0] * e[1][2]) / det;
    inv[2][0] = (e[1][0] * e[2][1] - e[1][1] * e[2][0]) / det;
    inv[2][1] = (e[0][1] * e[2][0] - e[0][0] * e[2][1]) / det;
    inv[2][2] = (e[0][0] * e[1][1] - e[0][1] * e[1][0]) / det;
    // grad(lambda_{a+1}) is the a-th column of inverse(E)
    for (int a = 0; a < 3; ++a)
      for (int d = 0; d < 3; ++d) cell_grad[c][a + 1][d] = inv[d][a];
    for (int d = 0; d < 3; ++d)
      cell_grad[c][0][d] = -(cell_grad[c][1][d] + cell_grad[c][2][d] + cell_grad[c][3][d]);
  }
}

namespace {

// Graded 1D node distribution on [lo, hi], cell size growing from h_min
// at the `cluster` end (which must be lo or hi) with the given ratio,
// capped at h_max; the sequence is rescaled so the last node lands on
// the far end exactly.
std::vector<double> graded_segment(double lo, double hi, bool cluster_at_lo, double h_min,
                                   double h_max, double growth) {
  const double len = hi - lo;
  std::vector<double> steps;
  double h = h_min;
  double acc = 0.0;
  while (acc < len) {
    steps.push_back(h);
    acc += h;
    h = std::min(h * growth, h_max);
  }
  const double scale = len / acc;
  std::vector<double> pts{0.0};
  for (double s : steps) pts.push_back(pts.back() + s * scale);
  pts.back() = len;
  std::vector<double> out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    out[i] = cluster_at_lo ? lo + pts[i] : hi - pts[pts.size() - 1 - i];
  return out;
}

// Concatenates graded segments between breakpoints, clustering toward
// the given interior breakpoint.
std::vector<double> graded_axis(const std::vector<double>& breakpoints, double cluster,
                                double h_min, double h_max, double growth) {
  std::vector<double> axis;
  for (size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    const double lo = breakpoints[s];
    const double hi = breakpoints[s + 1];
    const bool cluster_at_lo = std::abs(lo - cluster) <= std::abs(hi - cluster);
    const double d_near = std::min(std::abs(lo - cluster), std::abs(hi - cluster));
    // segments that do not touch the cluster start from an already-grown size
    const double h0 = std::clamp(h_min + (growth - 1.0) * d_near, h_min, h_max);
    std::vector<double> seg = graded_segment(lo, hi, cluster_at_lo, h0, h_max, growth);
    if (!axis.empty()) seg.erase(seg.begin());
    axis.insert(axis.end(), seg.begin(), seg.end());
  }
  return axis;
}

double local_spacing(const std::vector<double>& axis, double x) {
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return axis[1] - axis[0];
  if (it == axis.end()) return axis[axis.size() - 1] - axis[axis.size() - 2];
  const size_t i = it - axis.begin();
  return axis[i] - axis[i - 1];
}

// Kuhn subdivision of a hex into 6 tets sharing the main diagonal;
// conforming across identically-split neighbours.
constexpr int kKuhnTets[6][4][3] = {
    {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}}, {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {1, 1, 1}},
    {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}}, {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {1, 1, 1}},
    {{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}}, {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};

double tet_volume(const std::array<double, 3>& p0, const std::array<double, 3>& p1,
                  const std::array<double, 3>& p2, const std::array<double, 3>& p3) {
  double e[3][3];
  const std::array<const std::array<double, 3>*, 3> ps{&p1, &p2, &p3};
  for (int a = 0; a < 3; ++a)
    for (int d = 0; d < 3; ++d) e[a][d] = (*ps[a])[d] - p0[d];
  const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                     e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                     e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
  return det / 6.0;
}

struct GridMesh {
  std::vector<double> gx, gy, gz;
  std::vector<std::array<double, 3>> nodes;
  int nx() const { return static_cast<int>(gx.size()); }
  int ny() const { return static_cast<int>(gy.size()); }
  int nz() const { return static_cast<int>(gz.size()); }
  int id(int i, int j, int k) const { return (k * ny() + j) * nx() + i; }
};

GridMesh make_grid(const std::vector<double>& bx, const std::vector<double>& by,
                   const std::vector<double>& bz, double cx, double cy, double cz, double h_min,
                   double h_max, double growth) {
  GridMesh g;
  g.gx = graded_axis(bx, cx, h_min, h_max, growth);
  g.gy = graded_axis(by, cy, h_min, h_max, growth);
  g.gz = graded_axis(bz, cz, h_min, h_max, growth);
  g.nodes.reserve(static_cast<size_t>(g.nx()) * g.ny() * g.nz());
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) g.nodes.push_back({g.gx[i], g.gy[j], g.gz[k]});
  return g;
}

// Geometry of the carved catheter for classification and snapping.
struct CatheterGeometry {
  double cx, cy;          // axis position
  double tip_z;           // lowest point of the electrode
  double sphere_z;        // center height of the hemispherical tip
  double el_top_z;        // electrode / catheter-body junction plane
  double R;               // electrode radius
  double therm_r;         // thermistor radius
  double therm_lo_z;      // bottom of the thermistor
  double hole_z;          // height of the hole centers
  double hole_r;          // hole radius

  // lateral electrode surface radius at height z
  double side_radius(double z) const {
    if (z >= sphere_z) return R;
    const double dz = sphere_z - z;
    return dz >= R ? 0.0 : std::sqrt(R * R - dz * dz);
  }
  bool inside_thermistor(double x, double y, double z) const {
    const double rho = std::hypot(x - cx, y - cy);
    return rho < therm_r && z > therm_lo_z && z < el_top_z;
  }
  bool inside_electrode(double x, double y, double z) const {
    if (z < tip_z || z > el_top_z) return false;
    const double rho = std::hypot(x - cx, y - cy);
    return rho < side_radius(z);
  }
  bool inside_body(double x, double y, double z) const {
    return z > el_top_z && std::hypot(x - cx, y - cy) < R;
  }
  bool in_hole(double x, double y, double z) const {
    const double theta = std::atan2(y - cy, x - cx);
    double best = std::numeric_limits<double>::max();
    for (int k = 0; k < 6; ++k) {
      double d = theta - k * kPi / 3.0;
      while (d > kPi) d -= 2.0 * kPi;
      while (d < -kPi) d += 2.0 * kPi;
      best = std::min(best, std::abs(d));
    }
    const double arc = R * best;
    const double dz = z - hole_z;
    return arc * arc + dz * dz < hole_r * hole_r;
  }
};

}  // namespace

Mesh build_box_mesh(int nx, int ny, int nz, double lx, double ly, double lz, Region region) {
  Mesh mesh;
  GridMesh g;
  auto linspace = [](int n, double l) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = l * i / n;
    return v;
  };
  g.gx = linspace(nx, lx);
  g.gy = linspace(ny, ly);
  g.gz = linspace(nz, lz);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) g.nodes.push_back({g.gx[i], g.gy[j], g.gz[k]});
  mesh.nodes = g.nodes;
  for (int k = 0; k + 1 < g.nz(); ++k)
    for (int j = 0; j + 1 < g.ny(); ++j)
      for (int i = 0; i + 1 < g.nx(); ++i)
        for (const auto& tet : kKuhnTets) {
          std::array<int, 4> cell;
          for (int a = 0; a < 4; ++a)
            cell[a] = g.id(i + tet[a][0], j + tet[a][1], k + tet[a][2]);
          if (tet_volume(mesh.nodes[cell[0]], mesh.nodes[cell[1]], mesh.nodes[cell[2]],
                         mesh.nodes[cell[3]]) < 0.0)
            std::swap(cell[2], cell[3]);
          mesh.cells.push_back(cell);
          mesh.cell_region.push_back(region);
        }
  // boundary facets
  std::map<std::array<int, 3>, std::pair<int, int>> faces;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : kFace) {
      std::array<int, 3> key{cell[f[0]], cell[f[1]], cell[f[2]]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.emplace(key, std::make_pair(1, c));
      if (!inserted) it->second.first++;
    }
  }
  const double eps = 1e-12;
  for (const auto& [key, info] : faces) {
    if (info.first != 1) continue;
    Mesh::Facet facet{key, FacetTag::Lateral, info.second};
    bool x0 = true, x1 = true, z0 = true;
    for (int a = 0; a < 3; ++a) {
      const auto& p = mesh.nodes[key[a]];
      x0 &= std::abs(p[0]) < eps;
      x1 &= std::abs(p[0] - lx) < eps;
      z0 &= std::abs(p[2]) < eps;
    }
    if (x0)
      facet.tag = FacetTag::Inflow;
    else if (x1)
      facet.tag = FacetTag::Outflow;
    else if (z0)
      facet.tag = FacetTag::Bottom;
    mesh.facets.push_back(facet);
  }
  mesh.compute_geometry();
  return mesh;
}

Mesh build_mesh(const GeometryConfig& config, const CatheterSpec& spec,
                const MaterialTable& materials) {
  const double box = config.box;
  const double cx = box / 2.0, cy = box / 2.0;
  const double z_board = config.board_h;
  const double z_surface = config.board_h + config.tissue_h;  // undeformed tissue plane

  // Contact solution defines both the indentation depth and (in elastic
  // mode) the deformed surface profile.
  ContactSolution sol;
  if (config.force_gf > 0.0) {
    const RegionParams& tissue = materials.region(Region::Tissue);
    sol = solve_contact(grams_force_to_newtons(config.force_gf), spec.R, tissue.young,
                        tissue.poisson);
  } else {
    sol.R = spec.R;
  }
  const double omega_max = sol.omega_max;

  CatheterGeometry cat;
  cat.cx = cx;
  cat.cy = cy;
  cat.tip_z = z_surface - omega_max;
  cat.sphere_z = cat.tip_z + spec.R;
  cat.el_top_z = cat.tip_z + spec.h_e;
  cat.R = spec.R;
  cat.therm_r = spec.thermistor_diameter / 2.0;
  cat.therm_lo_z = cat.el_top_z - spec.thermistor_length;
  cat.hole_z = cat.tip_z + spec.R + spec.R_h;
  cat.hole_r = spec.R_h;

  GridMesh grid = make_grid({0.0, cx, box}, {0.0, cy, box}, {0.0, z_board, z_surface, box}, cx,
                            cy, z_surface, config.h_min, config.h_max, config.growth);

  // Radial table of the surface displacement, capped to zero beyond
  // 20 a where the profile has decayed below 5% of omega_max.
  const bool elastic = config.mode == GeometryConfig::Mode::Elastic;
  std::vector<double> omega_r, omega_v;
  double r_cap = 0.0;
  if (elastic && omega_max > 0.0) {
    r_cap = 20.0 * sol.a;
    const int samples = 512;
    omega_r.resize(samples + 1);
    omega_v.resize(samples + 1);
    for (int i = 0; i <= samples; ++i) {
      const double r = r_cap * i / samples;
      omega_r[i] = r;
      omega_v[i] = displacement(sol, r);
    }
    omega_v.back() = 0.0;
  }
  auto surface_drop = [&](double rho) -> double {
    if (!elastic || omega_max <= 0.0 || rho >= r_cap) return 0.0;
    const double x = rho / r_cap * (omega_r.size() - 1);
    const size_t i = std::min(static_cast<size_t>(x), omega_r.size() - 2);
    const double f = x - i;
    return omega_v[i] * (1.0 - f) + omega_v[i + 1] * f;
  };

  // 1) deform the tissue surface: the grid plane z = z_surface maps onto
  //    the displaced interface, blending out over a vertical band
  const double blend_band = 0.012;
  for (auto& p : grid.nodes) {
    const double rho = std::hypot(p[0] - cx, p[1] - cy);
    const double drop = surface_drop(rho);
    if (drop <= 0.0) continue;
    const double dz = std::abs(p[2] - z_surface);
    if (dz >= blend_band) continue;
    p[2] -= drop * (1.0 - dz / blend_band);
  }

  // 2) snap nodes onto the electrode surface and the junction plane
  for (auto& p : grid.nodes) {
    const double hx = local_spacing(grid.gx, p[0]);
    const double hz = local_spacing(grid.gz, p[2]);
    const double rho = std::hypot(p[0] - cx, p[1] - cy);
    if (rho > cat.R + 3.0 * hx) continue;
    if (p[2] < cat.tip_z - 3.0 * hz || p[2] > cat.el_top_z + 3.0 * hz) continue;

    if (p[2] < cat.sphere_z) {
      // hemispherical tip: radial snap toward the sphere
      const double dxs = p[0] - cx, dys = p[1] - cy, dzs = p[2] - cat.sphere_z;
      const double dist = std::sqrt(dxs * dxs + dys * dys + dzs * dzs);
      if (dist > 1e-12 && std::abs(dist - cat.R) < 0.4 * std::min(hx, hz)) {
        const double s = cat.R / dist;
        p[0] = cx + dxs * s;
        p[1] = cy + dys * s;
        p[2] = cat.sphere_z + dzs * s;
      }
    } else if (p[2] <= cat.el_top_z + 0.5 * hz) {
      // cylindrical wall
      if (rho > 1e-12 && std::abs(rho - cat.R) < 0.4 * hx) {
        const double s = cat.R / rho;
        p[0] = cx + (p[0] - cx) * s;
        p[1] = cy + (p[1] - cy) * s;
      }
      // junction plane, so the electrode-top annulus is clean
      if (std::abs(p[2] - cat.el_top_z) < 0.4 * hz) p[2] = cat.el_top_z;
    }
  }

  // 3) tetrahedralize, classify by centroid, drop the catheter-body void
  Mesh mesh;
  std::vector<int> node_map(grid.nodes.size(), -1);
  auto map_node = [&](int gid) {
    if (node_map[gid] < 0) {
      node_map[gid] = mesh.num_nodes();
      mesh.nodes.push_back(grid.nodes[gid]);
    }
    return node_map[gid];
  };

  std::vector<Region> region_of;
  for (int k = 0; k + 1 < grid.nz(); ++k)
    for (int j = 0; j + 1 < grid.ny(); ++j)
      for (int i = 0; i + 1 < grid.nx(); ++i)
        for (const auto& tet : kKuhnTets) {
          std::array<int, 4> gids;
          for (int a = 0; a < 4; ++a)
            gids[a] = grid.id(i + tet[a][0], j + tet[a][1], k + tet[a][2]);
          std::array<double, 3> cen{0.0, 0.0, 0.0};
          for (int a = 0; a < 4; ++a)
            for (int d = 0; d < 3; ++d) cen[d] += 0.25 * grid.nodes[gids[a]][d];

          Region region;
          if (cat.inside_body(cen[0], cen[1], cen[2])) continue;  // void
          if (cat.inside_thermistor(cen[0], cen[1], cen[2]))
            region = Region::Thermistor;
          else if (cat.inside_electrode(cen[0], cen[1], cen[2]))
            region = Region::Electrode;
          else if (cen[2] < z_board)
            region = Region::Board;
          else if (cen[2] < z_surface - surface_drop(std::hypot(cen[0] - cx, cen[1] - cy)))
            region = Region::Tissue;
          else
            region = Region::Blood;

          std::array<int, 4> cell;
          for (int a = 0; a < 4; ++a) cell[a] = map_node(gids[a]);
          if (tet_volume(mesh.nodes[cell[0]], mesh.nodes[cell[1]], mesh.nodes[cell[2]],
                         mesh.nodes[cell[3]]) < 0.0)
            std::swap(cell[2], cell[3]);
          mesh.cells.push_back(cell);
          region_of.push_back(region);
        }
  mesh.cell_region = std::move(region_of);

  // 4) facet extraction and tagging
  std::map<std::array<int, 3>, std::array<int, 2>> faces;  // sorted nodes -> up to 2 cells
  static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    for (const auto& f : kFace) {
      std::array<int, 3> key{cell[f[0]], cell[f[1]], cell[f[2]]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.emplace(key, std::array<int, 2>{c, -1});
      if (!inserted) it->second[1] = c;
    }
  }

  const double eps = 1e-12;
  for (const auto& [key, cc] : faces) {
    Mesh::Facet facet{key, FacetTag::Lateral, cc[0]};
    std::array<double, 3> cen{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a)
      for (int d = 0; d < 3; ++d) cen[d] += mesh.nodes[key[a]][d] / 3.0;

    if (cc[1] < 0) {
      // boundary facet: box wall or carved catheter surface
      bool x0 = true, x1 = true, y0 = true, y1 = true, z0 = true, z1 = true;
      for (int a = 0; a < 3; ++a) {
        const auto& p = mesh.nodes[key[a]];
        x0 &= std::abs(p[0]) < eps;
        x1 &= std::abs(p[0] - box) < eps;
        y0 &= std::abs(p[1]) < eps;
        y1 &= std::abs(p[1] - box) < eps;
        z0 &= std::abs(p[2]) < eps;
        z1 &= std::abs(p[2] - box) < eps;
      }
      if (x0)
        facet.tag = FacetTag::Inflow;
      else if (x1)
        facet.tag = FacetTag::Outflow;
      else if (z0)
        facet.tag = FacetTag::Bottom;
      else if (y0 || y1 || z1)
        facet.tag = FacetTag::Lateral;
      else if (mesh.cell_region[cc[0]] == Region::Electrode &&
               std::abs(cen[2] - cat.el_top_z) < 0.25 * config.h_min)
        facet.tag = FacetTag::ElectrodeTop;
      else
        facet.tag = FacetTag::CatheterInsulated;
      mesh.facets.push_back(facet);
      continue;
    }

    const Region ra = mesh.cell_region[cc[0]];
    const Region rb = mesh.cell_region[cc[1]];
    if (ra == rb) continue;
    const bool tb = (ra == Region::Tissue && rb == Region::Blood) ||
                    (ra == Region::Blood && rb == Region::Tissue);
    const bool eb = (ra == Region::Electrode && rb == Region::Blood) ||
                    (ra == Region::Blood && rb == Region::Electrode);
    if (tb) {
      facet.tag = FacetTag::TissueBloodInterface;
      facet.cell = (ra == Region::Blood) ? cc[0] : cc[1];
      mesh.facets.push_back(facet);
    } else if (eb && cat.in_hole(cen[0], cen[1], cen[2])) {
      facet.tag = FacetTag::HoleInlet;
      facet.cell = (ra == Region::Blood) ? cc[0] : cc[1];
      mesh.facets.push_back(facet);
    }
  }

  mesh.compute_geometry();
  return mesh;
}

namespace {

double dihedral_quality(const Mesh& mesh, int c) {
  // radius ratio 3 r_in / r_circ in (0, 1]
  const auto& cell = mesh.cells[c];
  const auto& p0 = mesh.nodes[cell[0]];
  const auto& p1 = mesh.nodes[cell[1]];
  const auto& p2 = mesh.nodes[cell[2]];
  const auto& p3 = mesh.nodes[cell[3]];
  auto tri_area = [](const std::array<double, 3>& a, const std::array<double, 3>& b,
                     const std::array<double, 3>& cpt) {
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = cpt[0] - a[0], vy = cpt[1] - a[1], vz = cpt[2] - a[2];
    const double cx2 = uy * vz - uz * vy, cy2 = uz * vx - ux * vz, cz2 = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx2 * cx2 + cy2 * cy2 + cz2 * cz2);
  };
  const double area = tri_area(p1, p2, p3) + tri_area(p0, p2, p3) + tri_area(p0, p1, p3) +
                      tri_area(p0, p1, p2);
  const double v = mesh.cell_volume[c];
  const double r_in = 3.0 * v / area;
  // circumradius from |p - center| equal for all vertices
  double m[3][3], rhsv[3];
  for (int a = 0; a < 3; ++a) {
    const auto& pa = mesh.nodes[cell[a + 1]];
    double norm_diff = 0.0;
    for (int d = 0; d < 3; ++d) {
      m[a][d] = 2.0 * (pa[d] - p0[d]);
      norm_diff += pa[d] * pa[d] - p0[d] * p0[d];
    }
    rhsv[a] = norm_diff;
  }
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-300) return 0.0;
  double ctr[3];
  for (int d = 0; d < 3; ++d) {
    double mm[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) mm[a][b] = (b == d) ? rhsv[a] : m[a][b];
    ctr[d] = (mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
              mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
              mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0])) /
             det;
  }
  const double r_circ = std::sqrt((ctr[0] - p0[0]) * (ctr[0] - p0[0]) +
                                  (ctr[1] - p0[1]) * (ctr[1] - p0[1]) +
                                  (ctr[2] - p0[2]) * (ctr[2] - p0[2]));
  return r_circ > 0.0 ? 3.0 * r_in / r_circ : 0.0;
}

}  // namespace

MeshDiagnostics validate_mesh(const Mesh& mesh) {
  MeshDiagnostics d;
  d.min_cell_volume = std::numeric_limits<double>::max();
  d.min_dihedral_quality = std::numeric_limits<double>::max();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double v = mesh.cell_volume[c];
    d.min_cell_volume = std::min(d.min_cell_volume, v);
    d.max_cell_volume = std::max(d.max_cell_volume, v);
    d.region_volume[static_cast<int>(mesh.cell_region[c])] += v;
    d.min_dihedral_quality = std::min(d.min_dihedral_quality, dihedral_quality(mesh, c));
  }
  for (const auto& f : mesh.facets)
    d.tag_area[static_cast<int>(f.tag)] += mesh.facet_area(f);

  // watertightness: every facet belongs to one or two cells, and every
  // single-cell facet appears in the tagged boundary list
  std::map<std::array<int, 3>, int> count;
  static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& cell : mesh.cells)
    for (const auto& f : kFace) {
      std::array<int, 3> key{cell[f[0]], cell[f[1]], cell[f[2]]};
      std::sort(key.begin(), key.end());
      count[key]++;
    }
  std::map<std::array<int, 3>, bool> tagged;
  for (const auto& f : mesh.facets) {
    std::array<int, 3> key = f.n;
    std::sort(key.begin(), key.end());
    tagged[key] = true;
  }
  d.watertight = true;
  for (const auto& [key, n] : count) {
    if (n > 2) d.watertight = false;
    if (n == 1 && !tagged.count(key)) ++d.untagged_boundary_facets;
  }
  if (d.untagged_boundary_facets > 0)
    throw std::runtime_error("validate_mesh: " + std::to_string(d.untagged_boundary_facets) +
                             " untagged boundary facets");
  return d;
}

std::string MeshDiagnostics::summary() const {
  std::ostringstream os;
  os << "cell volume [" << min_cell_volume << ", " << max_cell_volume << "] m^3\n";
  os << "min radius-ratio quality " << min_dihedral_quality << "\n";
  for (int r = 0; r < kNumRegions; ++r)
    os << "volume " << region_name(static_cast<Region>(r)) << " = " << region_volume[r]
       << " m^3\n";
  for (int t = 0; t < kNumFacetTags; ++t)
    os << "area " << facet_tag_name(static_cast<FacetTag>(t)) << " = " << tag_area[t]
       << " m^2\n";
  os << "watertight: " << (watertight ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace rfa
