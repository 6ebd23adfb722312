// Lesion assessment: marching tetrahedra on the 50 degC isotherm in the
// tissue, per-cell enclosed volume fractions and the table metrics.
#pragma once

#include <optional>
#include <string>

#include "rfa/femcore.hpp"

namespace rfa {

struct Isosurface {
  double iso = 50.0;  // [degC]
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> triangles;  // outward-oriented (away from the hot side)
  std::vector<double> cell_fraction;          // enclosed volume fraction, 0 outside tissue
};

// Marching-tetrahedra triangulation of the T = iso level set restricted
// to tissue cells. Nodes exactly at the isotherm count as inside.
Isosurface extract_lesion(const ScalarField& temperature, const Mesh& mesh, double iso = 50.0);

// Signed divergence-theorem volume of the triangulated surface; only
// meaningful when the lesion does not touch the tissue boundary.
double isosurface_volume(const Isosurface& surface);

struct LesionMetrics {
  double d = 0.0;    // depth below the datum plane [mm]
  double wx = 0.0;   // max width along the flow [mm]
  double wy = 0.0;   // max width across the flow [mm]
  double dwx = 0.0;  // depth of the widest x cross-section [mm]
  double dwy = 0.0;  // depth of the widest y cross-section [mm]
  double volume = 0.0;   // [mm^3]
  double surface = 0.0;  // lesion area on the tissue-blood interface [mm^2]
  double t_max = 0.0;    // max tissue temperature [degC]
  std::optional<double> pop_time;  // filled by the pipeline [s]
};

struct LesionConfig {
  double z_ref = 0.04;  // undeformed tissue surface plane [m]
  // Facets counted toward S; the box benchmark meshes have no
  // tissue-blood interface and use one of the wall tags instead.
  FacetTag surface_tag = FacetTag::TissueBloodInterface;
  int depth_bins = 200;
};

LesionMetrics lesion_metrics(const Isosurface& surface, const ScalarField& temperature,
                             const Mesh& mesh, const LesionConfig& config = {});

// Legacy ASCII VTK polydata export of the isotherm triangulation.
void write_isosurface_vtk(const Isosurface& surface, const std::string& path);

}  // namespace rfa
