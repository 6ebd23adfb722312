#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "rfa/mesh.hpp"

namespace rfa {

void write_vtk(const Mesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& point_scalars,
               const std::vector<std::pair<std::string, const std::vector<std::array<double, 3>>*>>& point_vectors) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "# vtk DataFile Version 3.0\nrfa unstructured grid\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  os.precision(12);
  for (const auto& p : mesh.nodes) os << p[0] << " " << p[1] << " " << p[2] << "\n";
  os << "CELLS " << mesh.num_cells() << " " << 5 * mesh.num_cells() << "\n";
  for (const auto& c : mesh.cells) os << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  os << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c) os << "10\n";
  os << "CELL_DATA " << mesh.num_cells() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (Region r : mesh.cell_region) os << static_cast<int>(r) << "\n";
  if (!point_scalars.empty() || !point_vectors.empty()) {
    os << "POINT_DATA " << mesh.num_nodes() << "\n";
    for (const auto& [name, values] : point_scalars) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *values) os << v << "\n";
    }
    for (const auto& [name, values] : point_vectors) {
      os << "VECTORS " << name << " double\n";
      for (const auto& v : *values) os << v[0] << " " << v[1] << " " << v[2] << "\n";
    }
  }
}

namespace {
constexpr std::uint64_t kMagic = 0x5246414d45534831ull;  // "RFAMESH1"

template <class T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void read_pod(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_pod(os, kMagic);
  const std::uint64_t nn = mesh.nodes.size(), nc = mesh.cells.size(), nf = mesh.facets.size();
  write_pod(os, nn);
  write_pod(os, nc);
  write_pod(os, nf);
  os.write(reinterpret_cast<const char*>(mesh.nodes.data()), nn * sizeof(mesh.nodes[0]));
  os.write(reinterpret_cast<const char*>(mesh.cells.data()), nc * sizeof(mesh.cells[0]));
  os.write(reinterpret_cast<const char*>(mesh.cell_region.data()), nc * sizeof(Region));
  for (const auto& f : mesh.facets) {
    write_pod(os, f.n);
    write_pod(os, f.tag);
    write_pod(os, f.cell);
  }
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::uint64_t magic = 0, nn = 0, nc = 0, nf = 0;
  read_pod(is, magic);
  if (magic != kMagic) throw std::runtime_error("not an rfa mesh file: " + path);
  read_pod(is, nn);
  read_pod(is, nc);
  read_pod(is, nf);
  Mesh mesh;
  mesh.nodes.resize(nn);
  mesh.cells.resize(nc);
  mesh.cell_region.resize(nc);
  is.read(reinterpret_cast<char*>(mesh.nodes.data()), nn * sizeof(mesh.nodes[0]));
  is.read(reinterpret_cast<char*>(mesh.cells.data()), nc * sizeof(mesh.cells[0]));
  is.read(reinterpret_cast<char*>(mesh.cell_region.data()), nc * sizeof(Region));
  mesh.facets.resize(nf);
  for (auto& f : mesh.facets) {
    read_pod(is, f.n);
    read_pod(is, f.tag);
    read_pod(is, f.cell);
  }
  if (!is) throw std::runtime_error("truncated mesh file: " + path);
  mesh.compute_geometry();
  return mesh;
}

}  // namespace rfa
