// Tetrahedral mesh of the 80x80x80 mm five-subdomain box with the
// catheter carved out, the tissue surface deformed elastically or
// sharply, graded refinement near the electrode and tagged facets.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rfa/contact.hpp"
#include "rfa/params.hpp"
#include "rfa/powersplit.hpp"

namespace rfa {

enum class FacetTag : std::uint8_t {
  Inflow = 0,            // x = 0
  Outflow,               // x = 0.08
  Bottom,                // z = 0, dispersive electrode
  Lateral,               // remaining box walls
  ElectrodeTop,          // annular electrode / catheter-body junction
  HoleInlet,             // saline irrigation hole facets (electrode-blood)
  CatheterInsulated,     // carved catheter-body wall, thermistor top
  TissueBloodInterface,  // internal tissue-blood facets
};
inline constexpr int kNumFacetTags = 8;

std::string_view facet_tag_name(FacetTag t);

struct Mesh {
  std::vector<std::array<double, 3>> nodes;
  std::vector<std::array<int, 4>> cells;
  std::vector<Region> cell_region;

  struct Facet {
    std::array<int, 3> n;
    FacetTag tag;
    int cell;  // incident cell (blood side for internal interfaces)
  };
  std::vector<Facet> facets;

  // Derived geometry, filled by compute_geometry().
  std::vector<double> cell_volume;
  // Gradients of the four P1 basis functions, constant per cell.
  std::vector<std::array<std::array<double, 3>, 4>> cell_grad;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }

  std::array<double, 3> cell_centroid(int c) const;
  double facet_area(const Facet& f) const;
  std::array<double, 3> facet_normal(const Facet& f) const;  // unit, arbitrary orientation
  std::array<double, 3> facet_centroid(const Facet& f) const;

  // Volumes and basis gradients for every cell. Throws mesh-quality
  // error when a cell volume falls below 1e-18 m^3.
  void compute_geometry();
};

struct GeometryConfig {
  enum class Mode { Elastic, Sharp };
  Mode mode = Mode::Elastic;
  double force_gf = 10.0;

  double h_min = 2.5e-4;  // target cell size near the electrode [m]
  double h_max = 8.0e-3;  // far-field cell size [m]
  double growth = 1.35;   // geometric grading ratio

  double box = 0.08;       // cube edge [m]
  double board_h = 0.02;   // board slab thickness [m]
  double tissue_h = 0.02;  // tissue slab thickness [m]
};

// Builds the full five-subdomain simulation mesh. The catheter axis is
// vertical through the box center; the electrode tip sits at depth
// omega_max below the undeformed tissue plane. In elastic mode the
// tissue surface follows the contact displacement profile; in sharp mode
// the surface stays flat and a tip-shaped void is cut into the tissue.
Mesh build_mesh(const GeometryConfig& config, const CatheterSpec& spec,
                const MaterialTable& materials);

// Plain graded box without catheter, single region; used for channel
// benchmarks and FEM verification tests. All outer facets are tagged
// Inflow/Outflow/Bottom/Lateral by position.
Mesh build_box_mesh(int nx, int ny, int nz, double lx, double ly, double lz,
                    Region region = Region::Blood);

struct MeshDiagnostics {
  double min_cell_volume = 0.0;
  double max_cell_volume = 0.0;
  double min_dihedral_quality = 0.0;  // inradius/circumradius ratio, scaled to [0,1]
  std::array<double, kNumRegions> region_volume{};
  std::array<double, kNumFacetTags> tag_area{};
  int untagged_boundary_facets = 0;
  bool watertight = false;

  std::string summary() const;
};

// Reports per-region volumes, per-tag facet areas, cell quality and
// watertightness (every interior facet shared by exactly two cells).
// Fails (throws) on untagged boundary facets.
MeshDiagnostics validate_mesh(const Mesh& mesh);

// Mesh (and optional nodal fields) export: legacy ASCII VTK.
void write_vtk(const Mesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& point_scalars = {},
               const std::vector<std::pair<std::string, const std::vector<std::array<double, 3>>*>>& point_vectors = {});

// Compact binary mesh snapshot (nodes, cells, regions, facets).
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace rfa
