// Command line front end: contact, powersplit, mesh, calibrate, run,
// lesion and sweep subcommands over the simulator library.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rfa/contact.hpp"
#include "rfa/lesion.hpp"
#include "rfa/mesh.hpp"
#include "rfa/pipeline.hpp"
#include "rfa/potential.hpp"
#include "rfa/powersplit.hpp"

namespace {

rfa::SimConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return rfa::SimConfig::from_file(path);
}

void apply_overrides(rfa::SimConfig& cfg, const std::string& mode, const std::string& protocol,
                     const std::string& out_dir) {
  if (!mode.empty()) cfg.set("mode", mode);
  if (!protocol.empty()) cfg.set("protocol", protocol);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
}

// Minimal reader for the legacy VTK grids this tool writes: points,
// tetrahedra, the region cell scalar and one double point scalar
// (prefers one named "temperature").
void read_field_vtk(const std::string& path, rfa::Mesh& mesh, rfa::ScalarField& field) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string tok;
  long n_cells = 0;
  bool point_data = false;
  std::string best_scalar;
  std::vector<double> scalar_values;
  while (in >> tok) {
    if (tok == "POINTS") {
      long n = 0;
      std::string type;
      in >> n >> type;
      mesh.nodes.resize(n);
      for (auto& p : mesh.nodes) in >> p[0] >> p[1] >> p[2];
    } else if (tok == "CELLS") {
      long total = 0;
      in >> n_cells >> total;
      mesh.cells.resize(n_cells);
      for (auto& c : mesh.cells) {
        int k = 0;
        in >> k;
        if (k != 4) throw std::runtime_error("expected tetrahedral cells in " + path);
        in >> c[0] >> c[1] >> c[2] >> c[3];
      }
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps = 1;
      in >> name >> type >> comps;
      std::string lut, lut_name;
      in >> lut >> lut_name;  // LOOKUP_TABLE default
      if (!point_data && name == "region") {
        mesh.cell_region.resize(n_cells);
        for (auto& r : mesh.cell_region) {
          int v = 0;
          in >> v;
          r = static_cast<rfa::Region>(v);
        }
      } else if (point_data && (best_scalar.empty() || name == "temperature")) {
        best_scalar = name;
        scalar_values.resize(mesh.nodes.size());
        for (auto& v : scalar_values) in >> v;
      } else {
        double skip = 0.0;
        const size_t count = (point_data ? mesh.nodes.size() : (size_t)n_cells) * comps;
        for (size_t i = 0; i < count; ++i) in >> skip;
      }
    } else if (tok == "POINT_DATA") {
      long n = 0;
      in >> n;
      point_data = true;
    }
  }
  if (mesh.nodes.empty() || mesh.cells.empty())
    throw std::runtime_error("no tetrahedral grid found in " + path);
  if (mesh.cell_region.empty()) mesh.cell_region.assign(mesh.cells.size(), rfa::Region::Tissue);
  if (best_scalar.empty()) throw std::runtime_error("no point scalar field found in " + path);
  mesh.compute_geometry();
  field.mesh = &mesh;
  field.values = std::move(scalar_values);
}

void print_metrics(const rfa::RunRecord& rec) {
  std::printf("alpha          %.4f %%\n", 100.0 * rec.split.alpha);
  std::printf("P_tissue       %.6g W\n", rec.split.P_tissue);
  std::printf("sigma_b        %.6g S/m\n", rec.sigma_b);
  std::printf("V0(0)          %.6g V\n", rec.v0_initial);
  std::printf("P0             %.6g W\n", rec.p0);
  std::printf("D              %.4g mm\n", rec.lesion.d);
  std::printf("Wx / Wy        %.4g / %.4g mm\n", rec.lesion.wx, rec.lesion.wy);
  std::printf("DWx / DWy      %.4g / %.4g mm\n", rec.lesion.dwx, rec.lesion.dwy);
  std::printf("V              %.5g mm^3\n", rec.lesion.volume);
  std::printf("S              %.5g mm^2\n", rec.lesion.surface);
  std::printf("Tmax           %.4f degC\n", rec.lesion.t_max);
  if (rec.pop_time) std::printf("pop time       %.3f s\n", *rec.pop_time);
  std::printf("termination    %s\n", rec.termination.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radiofrequency ablation simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode, protocol;
  std::vector<double> forces{10.0, 20.0, 40.0};

  auto* c_contact = app.add_subcommand("contact", "elastic punch contact solve");
  double force_gf = 10.0, profile_max = 5.0;
  std::string profile_out;
  c_contact->add_option("--force-gf", force_gf, "contact force [gf]");
  c_contact->add_option("--profile-out", profile_out, "CSV of the surface profile");
  c_contact->add_option("--profile-extent", profile_max, "profile extent in contact radii");

  auto* c_split = app.add_subcommand("powersplit", "contact areas and tissue power fraction");
  double power = 20.0;
  c_split->add_option("--force-gf", forces, "forces [gf]");
  c_split->add_option("--power", power, "generator power [W]");
  c_split->add_option("--mode", mode, "elastic|sharp")->default_str("elastic");

  auto* c_mesh = app.add_subcommand("mesh", "build and validate the simulation mesh");
  std::string vtk_out, bin_out;
  c_mesh->add_option("--config", config_path, "simulation config file");
  c_mesh->add_option("--mode", mode, "elastic|sharp");
  c_mesh->add_option("--force-gf", force_gf, "contact force [gf]");
  c_mesh->add_option("--out", vtk_out, "VTK output path");
  c_mesh->add_option("--save", bin_out, "binary mesh snapshot path");

  auto* c_cal = app.add_subcommand("calibrate", "board conductivity calibration");
  c_cal->add_option("--config", config_path, "simulation config file");
  c_cal->add_option("--mode", mode, "elastic|sharp");

  auto* c_run = app.add_subcommand("run", "full ablation simulation");
  c_run->add_option("--config", config_path, "simulation config file");
  c_run->add_option("--out-dir", out_dir, "output directory");
  c_run->add_option("--mode", mode, "elastic|sharp");
  c_run->add_option("--protocol", protocol, "HF|LF|custom");

  auto* c_lesion = app.add_subcommand("lesion", "lesion metrics from a saved field");
  std::string field_path, csv_out, surface_out;
  double iso = 50.0, z_ref = 0.04;
  c_lesion->add_option("--field", field_path, "VTK field snapshot")->required();
  c_lesion->add_option("--out", csv_out, "metrics CSV path");
  c_lesion->add_option("--surface-out", surface_out, "isosurface VTK polydata path");
  c_lesion->add_option("--iso", iso, "isotherm [degC]");
  c_lesion->add_option("--z-ref", z_ref, "depth datum plane [m]");

  auto* c_sweep = app.add_subcommand("sweep", "elastic vs sharp comparison table");
  c_sweep->add_option("--config", config_path, "base config file");
  c_sweep->add_option("--out-dir", out_dir, "output directory");
  c_sweep->add_option("--protocol", protocol, "HF|LF|custom");
  c_sweep->add_option("--forces", forces, "forces [gf]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_contact) {
      rfa::SimConfig cfg = load_config(config_path);
      const auto& tis = cfg.materials.region(rfa::Region::Tissue);
      const rfa::ContactSolution sol = rfa::solve_contact(
          rfa::grams_force_to_newtons(force_gf), cfg.catheter.R, tis.young, tis.poisson);
      std::printf("a          %.10g mm\n", 1e3 * sol.a);
      std::printf("omega_max  %.10g mm\n", 1e3 * sol.omega_max);
      std::printf("depth h    %.10g mm\n", 1e3 * rfa::contact_depth(sol));
      if (!profile_out.empty()) {
        std::ofstream out(profile_out);
        out << "r_m,omega_m\n";
        for (int i = 0; i <= 400; ++i) {
          const double r = profile_max * sol.a * i / 400.0;
          out << rfa::format_g17(r) << ',' << rfa::format_g17(rfa::displacement(sol, r)) << '\n';
        }
      }
    } else if (*c_split) {
      rfa::SimConfig cfg = load_config(config_path);
      const auto& tis = cfg.materials.region(rfa::Region::Tissue);
      const auto& blood = cfg.materials.region(rfa::Region::Blood);
      const bool sharp = mode == "sharp";
      std::printf("%8s %12s %12s %10s %10s\n", "F [gf]", "A_t [mm^2]", "A_b [mm^2]", "alpha [%]",
                  "P_t [W]");
      for (double f : forces) {
        const rfa::ContactSolution sol = rfa::solve_contact(
            rfa::grams_force_to_newtons(f), cfg.catheter.R, tis.young, tis.poisson);
        const double h = sharp ? sol.omega_max : rfa::contact_depth(sol);
        const rfa::PowerSplit split =
            rfa::power_split_at_depth(h, cfg.catheter, tis.sigma0, blood.sigma0, power);
        std::printf("%8g %12.6f %12.6f %10.4f %10.5f\n", f, 1e6 * split.A_tissue,
                    1e6 * split.A_blood, 100.0 * split.alpha, split.P_tissue);
      }
    } else if (*c_mesh) {
      rfa::SimConfig cfg = load_config(config_path);
      if (c_mesh->count("--force-gf")) cfg.force_gf = force_gf;
      apply_overrides(cfg, mode, protocol, "");
      const rfa::Mesh mesh = rfa::build_mesh(cfg.geometry(), cfg.catheter, cfg.materials);
      const rfa::MeshDiagnostics diag = rfa::validate_mesh(mesh);
      std::printf("nodes %d  cells %d  facets %zu\n", mesh.num_nodes(), mesh.num_cells(),
                  mesh.facets.size());
      std::printf("%s", diag.summary().c_str());
      if (!vtk_out.empty()) rfa::write_vtk(mesh, vtk_out);
      if (!bin_out.empty()) rfa::save_mesh(mesh, bin_out);
    } else if (*c_cal) {
      rfa::SimConfig cfg = load_config(config_path);
      apply_overrides(cfg, mode, protocol, "");
      const auto& tis = cfg.materials.region(rfa::Region::Tissue);
      const rfa::ContactSolution sol = rfa::solve_contact(
          rfa::grams_force_to_newtons(cfg.force_gf), cfg.catheter.R, tis.young, tis.poisson);
      const double h = cfg.mode == rfa::GeometryConfig::Mode::Elastic ? rfa::contact_depth(sol)
                                                                      : sol.omega_max;
      const rfa::PowerSplit split = rfa::power_split_at_depth(
          h, cfg.catheter, tis.sigma0, cfg.materials.region(rfa::Region::Blood).sigma0, cfg.power);
      rfa::MaterialTable materials = cfg.materials;
      const rfa::Mesh mesh = rfa::build_mesh(cfg.geometry(), cfg.catheter, materials);
      const rfa::CalibrationResult cal =
          rfa::calibrate_board(mesh, materials, cfg.power, cfg.r0, split);
      std::printf("alpha      %.4f %%\n", 100.0 * split.alpha);
      std::printf("target     %.6g W\n", split.P_tissue);
      std::printf("sigma_b    %.8g S/m\n", cal.sigma_b);
      std::printf("V0         %.8g V\n", cal.v0);
      std::printf("P_tissue   %.6g W\n", cal.p_tissue);
      std::printf("P0         %.6g W\n", cal.p0);
      std::printf("iterations %d\n", cal.iterations);
    } else if (*c_run) {
      rfa::SimConfig cfg = load_config(config_path);
      apply_overrides(cfg, mode, protocol, out_dir);
      const rfa::RunRecord rec = rfa::run_simulation(cfg);
      print_metrics(rec);
      if (rec.termination == "error") {
        std::fprintf(stderr, "error in stage %s: %s\n", rec.error_stage.c_str(),
                     rec.error.c_str());
        return 1;
      }
    } else if (*c_lesion) {
      rfa::Mesh mesh;
      rfa::ScalarField field;
      read_field_vtk(field_path, mesh, field);
      const rfa::Isosurface surface = rfa::extract_lesion(field, mesh, iso);
      rfa::LesionConfig lcfg;
      lcfg.z_ref = z_ref;
      const rfa::LesionMetrics m = rfa::lesion_metrics(surface, field, mesh, lcfg);
      std::printf("D %.4g mm  Wx %.4g mm  Wy %.4g mm  DWx %.4g mm  DWy %.4g mm\n", m.d, m.wx,
                  m.wy, m.dwx, m.dwy);
      std::printf("V %.5g mm^3  S %.5g mm^2  Tmax %.4f degC\n", m.volume, m.surface, m.t_max);
      if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        out << "d_mm,wx_mm,wy_mm,dwx_mm,dwy_mm,volume_mm3,surface_mm2,t_max_c\n";
        out << rfa::format_g17(m.d) << ',' << rfa::format_g17(m.wx) << ','
            << rfa::format_g17(m.wy) << ',' << rfa::format_g17(m.dwx) << ','
            << rfa::format_g17(m.dwy) << ',' << rfa::format_g17(m.volume) << ','
            << rfa::format_g17(m.surface) << ',' << rfa::format_g17(m.t_max) << '\n';
      }
      if (!surface_out.empty()) rfa::write_isosurface_vtk(surface, surface_out);
    } else if (*c_sweep) {
      rfa::SimConfig cfg = load_config(config_path);
      apply_overrides(cfg, mode, protocol, out_dir);
      const std::vector<rfa::RunRecord> records = rfa::compare_insertions(cfg, forces);
      std::vector<std::string> labels;
      size_t i = 0;
      for (const char* m : {"elastic", "sharp"})
        for (double f : forces) {
          std::ostringstream label;
          label << m << ' ' << f << "gf " << cfg.protocol;
          labels.push_back(label.str());
          ++i;
        }
      const std::string table =
          (cfg.out_dir.empty() ? std::string("comparison.csv") : cfg.out_dir + "/comparison.csv");
      rfa::write_comparison_csv(records, labels, table);
      bool failed = false;
      for (size_t k = 0; k < records.size(); ++k) {
        std::printf("--- %s ---\n", labels[k].c_str());
        print_metrics(records[k]);
        if (records[k].termination == "error") {
          failed = true;
          std::fprintf(stderr, "error in stage %s: %s\n", records[k].error_stage.c_str(),
                       records[k].error.c_str());
        }
      }
      std::printf("table written to %s\n", table.c_str());
      if (failed) return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
