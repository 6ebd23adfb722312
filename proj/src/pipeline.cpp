#include "rfa/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rfa {

namespace {

constexpr double kPi = 3.14159265358979323846;

double parse_double(const std::string& key, const std::string& value) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  }
  while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
  if (pos != value.size())
    throw std::invalid_argument("config: trailing characters for " + key + ": '" + value + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config " << path << ":" << lineno << ": expected key = value";
      throw std::runtime_error(msg.str());
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void SimConfig::set(const std::string& key, const std::string& value) {
  auto num = [&] { return parse_double(key, value); };
  auto region_key = [&](Region r, const std::string& field) {
    RegionParams& p = materials.region(r);
    if (field == "rho") p.rho = num();
    else if (field == "c") p.c0 = num();
    else if (field == "k") p.k0 = num();
    else if (field == "sigma") p.sigma0 = num();
    else if (field == "viscosity") p.kinematic_viscosity = num();
    else if (field == "poisson") p.poisson = num();
    else if (field == "young") p.young = num();
    else throw std::invalid_argument("config: unknown key " + key);
  };

  if (key == "force_gf") force_gf = num();
  else if (key == "power_w") power = num();
  else if (key == "duration_s") duration = num();
  else if (key == "impedance_ohm") r0 = num();
  else if (key == "mode") {
    if (value == "elastic") mode = GeometryConfig::Mode::Elastic;
    else if (value == "sharp") mode = GeometryConfig::Mode::Sharp;
    else throw std::invalid_argument("config: mode must be elastic or sharp");
  } else if (key == "protocol") {
    if (value == "HF") blood_velocity = 0.5;
    else if (value == "LF") blood_velocity = 0.1;
    else if (value != "custom") throw std::invalid_argument("config: protocol must be HF, LF or custom");
    protocol = value;
  } else if (key == "blood_velocity") {
    blood_velocity = num();
    protocol = "custom";
  } else if (key == "saline_ml_min") saline_ml_min = num();
  else if (key == "flow_solver") {
    if (value == "prescribed") flow_solver = FlowSolver::Prescribed;
    else if (value == "ns") flow_solver = FlowSolver::NavierStokes;
    else throw std::invalid_argument("config: flow_solver must be prescribed or ns");
  } else if (key == "dt_s") dt = num();
  else if (key == "snapshot_interval_s") snapshot_interval = num();
  else if (key == "mesh.h_min") h_min = num();
  else if (key == "mesh.h_max") h_max = num();
  else if (key == "mesh.growth") growth = num();
  else if (key == "initial_temperature_c") initial_temperature = num();
  else if (key == "wall_temperature_c") wall_temperature = num();
  else if (key == "saline_temperature_c") saline_temperature = num();
  else if (key == "out_dir") out_dir = value;
  else if (key.rfind("blood.", 0) == 0) region_key(Region::Blood, key.substr(6));
  else if (key.rfind("tissue.", 0) == 0) region_key(Region::Tissue, key.substr(7));
  else if (key.rfind("electrode.", 0) == 0) region_key(Region::Electrode, key.substr(10));
  else if (key.rfind("thermistor.", 0) == 0) region_key(Region::Thermistor, key.substr(11));
  else if (key == "catheter.tip_radius") catheter.R = num();
  else if (key == "catheter.length") catheter.h_e = num();
  else if (key == "catheter.hole_radius") catheter.R_h = num();
  else if (key == "catheter.thermistor_diameter") catheter.thermistor_diameter = num();
  else if (key == "catheter.thermistor_length") catheter.thermistor_length = num();
  else if (key == "catheter.channel_diameter") catheter.channel_diameter = num();
  else throw std::invalid_argument("config: unknown key " + key);
}

GeometryConfig SimConfig::geometry() const {
  GeometryConfig g;
  g.mode = mode;
  g.force_gf = force_gf;
  g.h_min = h_min;
  g.h_max = h_max;
  g.growth = growth;
  return g;
}

double SimConfig::saline_rate() const { return saline_ml_min * 1e-6 / 60.0; }

double SimConfig::hole_speed() const {
  const double area = catheter.n_holes * kPi * catheter.R_h * catheter.R_h;
  return saline_rate() / area;
}

namespace {

void write_timeseries(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t_s,v0_v,p_total_w,p_tissue_w,impedance_ohm,t_max_tissue_c,t_max_blood_c\n";
  for (size_t i = 0; i < rec.t.size(); ++i)
    out << format_g17(rec.t[i]) << ',' << format_g17(rec.v0[i]) << ','
        << format_g17(rec.p_total[i]) << ',' << format_g17(rec.p_tissue[i]) << ','
        << format_g17(rec.impedance[i]) << ',' << format_g17(rec.t_max_tissue[i]) << ','
        << format_g17(rec.t_max_blood[i]) << '\n';
}

void write_metrics(const RunRecord& rec, const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "force_gf,mode,protocol,power_w,alpha,p_tissue_target_w,sigma_b_s_m,v0_v,p0_w,"
         "d_mm,wx_mm,wy_mm,dwx_mm,dwy_mm,volume_mm3,surface_mm2,t_max_c,pop_time_s,"
         "termination,max_power_dev_w\n";
  out << format_g17(cfg.force_gf) << ','
      << (cfg.mode == GeometryConfig::Mode::Elastic ? "elastic" : "sharp") << ','
      << cfg.protocol << ',' << format_g17(cfg.power) << ',' << format_g17(rec.split.alpha)
      << ',' << format_g17(rec.split.P_tissue) << ',' << format_g17(rec.sigma_b) << ','
      << format_g17(rec.v0_initial) << ',' << format_g17(rec.p0) << ','
      << format_g17(rec.lesion.d) << ',' << format_g17(rec.lesion.wx) << ','
      << format_g17(rec.lesion.wy) << ',' << format_g17(rec.lesion.dwx) << ','
      << format_g17(rec.lesion.dwy) << ',' << format_g17(rec.lesion.volume) << ','
      << format_g17(rec.lesion.surface) << ',' << format_g17(rec.lesion.t_max) << ','
      << (rec.pop_time ? format_g17(*rec.pop_time) : std::string("nan")) << ','
      << rec.termination << ',' << format_g17(rec.max_power_deviation) << '\n';
}

void write_manifest(const RunRecord& rec, const SimConfig& cfg, const std::string& dir) {
  nlohmann::json j;
  j["config"]["force_gf"] = cfg.force_gf;
  j["config"]["power_w"] = cfg.power;
  j["config"]["duration_s"] = cfg.duration;
  j["config"]["impedance_ohm"] = cfg.r0;
  j["config"]["mode"] = cfg.mode == GeometryConfig::Mode::Elastic ? "elastic" : "sharp";
  j["config"]["protocol"] = cfg.protocol;
  j["config"]["blood_velocity"] = cfg.blood_velocity;
  j["config"]["saline_ml_min"] = cfg.saline_ml_min;
  j["config"]["flow_solver"] =
      cfg.flow_solver == SimConfig::FlowSolver::Prescribed ? "prescribed" : "ns";
  j["config"]["dt_s"] = cfg.dt;
  j["config"]["mesh"] = {{"h_min", cfg.h_min}, {"h_max", cfg.h_max}, {"growth", cfg.growth}};
  j["calibration"] = {{"alpha", rec.split.alpha},
                      {"p_tissue_target_w", rec.split.P_tissue},
                      {"sigma_b_s_m", rec.sigma_b},
                      {"v0_v", rec.v0_initial},
                      {"p0_w", rec.p0}};
  j["contact"] = {{"a_m", rec.contact.a},
                  {"omega_max_m", rec.contact.omega_max},
                  {"depth_m", rec.contact_h}};
  j["termination"] = rec.termination;
  if (rec.pop_time) j["pop_time_s"] = *rec.pop_time;
  if (!rec.error.empty()) {
    j["error_stage"] = rec.error_stage;
    j["error"] = rec.error;
  }
  j["outputs"] = {"timeseries.csv", "metrics.csv", "lesion.vtk"};
  std::ofstream out(dir + "/manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace

RunRecord run_simulation(const SimConfig& cfg) {
  RunRecord rec;
  std::string stage = "config";
  try {
    if (!(cfg.duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (cfg.power < 0.0) throw std::invalid_argument("power must be nonnegative");

    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

    stage = "contact";
    const RegionParams& tis = cfg.materials.region(Region::Tissue);
    rec.contact = solve_contact(grams_force_to_newtons(cfg.force_gf), cfg.catheter.R, tis.young,
                                tis.poisson);
    // elastic: tissue wets the tip up to the contact depth; sharp: the
    // flat surface wets the tip over the full insertion depth
    rec.contact_h = cfg.mode == GeometryConfig::Mode::Elastic ? contact_depth(rec.contact)
                                                              : rec.contact.omega_max;

    stage = "powersplit";
    rec.split = power_split_at_depth(rec.contact_h, cfg.catheter, tis.sigma0,
                                     cfg.materials.region(Region::Blood).sigma0, cfg.power);

    stage = "mesh";
    MaterialTable materials = cfg.materials;
    Mesh mesh = build_mesh(cfg.geometry(), cfg.catheter, materials);

    stage = "flow";
    VectorField velocity(mesh);
    FlowState flow_state;
    FlowOptions fopts;
    fopts.u_b = cfg.blood_velocity;
    fopts.u_s = cfg.hole_speed();
    fopts.saline_rate = cfg.saline_rate();
    fopts.nu = cfg.materials.region(Region::Blood).kinematic_viscosity;
    const bool use_ns = cfg.flow_solver == SimConfig::FlowSolver::NavierStokes;
    if (!use_ns)
      velocity = prescribed_flow(mesh, cfg.blood_velocity, cfg.hole_speed(), cfg.saline_rate());

    stage = "calibration";
    PotentialState ps;
    if (cfg.power > 0.0) {
      const CalibrationResult calib =
          calibrate_board(mesh, materials, cfg.power, cfg.r0, rec.split);
      rec.sigma_b = calib.sigma_b;
      rec.v0_initial = calib.v0;
      rec.p0 = calib.p0;
      ps.phi = calib.phi;
      ps.v0 = calib.v0;
      ps.p0 = calib.p0;
      ps.p_total = calib.p0;
      ps.sigma_b = calib.sigma_b;
    } else {
      ps.phi = ScalarField(mesh);
    }

    stage = "timeloop";
    BioheatOptions bopts;
    bopts.wall_temperature = cfg.wall_temperature;
    bopts.saline_temperature = cfg.saline_temperature;
    ThermalState ts;
    ts.temperature = ScalarField(mesh, cfg.initial_temperature);
    BioheatWorkspace ws;
    const long steps = std::lround(cfg.duration / cfg.dt);
    double next_snapshot = cfg.snapshot_interval > 0.0 ? cfg.snapshot_interval : -1.0;
    const std::vector<double> zero_source(mesh.num_cells(), 0.0);

    auto snapshot = [&](double t) {
      if (cfg.out_dir.empty()) return;
      std::ostringstream name;
      name << cfg.out_dir << "/fields_" << format_g17(t) << "s.vtk";
      write_vtk(mesh, name.str(), {{"temperature", &ts.temperature.values}, {"phi", &ps.phi.values}});
    };

    for (long step = 1; step <= steps; ++step) {
      const double t_next = step * cfg.dt;
      if (use_ns) {
        flow_state = step_flow(flow_state, mesh, ts.time, t_next, fopts);
        velocity = flow_state.u;
      }

      std::vector<double> sigma = sigma_field(mesh, materials, ts.temperature);
      double p_tis = 0.0;
      if (cfg.power > 0.0) {
        ps = rescale_voltage(mesh, ps, sigma);
        rec.max_power_deviation =
            std::max(rec.max_power_deviation, std::abs(ps.p_total - ps.p0));
        p_tis = dissipated_power(mesh, sigma, ps.phi, Region::Tissue);
      }
      const std::vector<double>& source =
          cfg.power > 0.0 ? joule_source(mesh, sigma, ps.phi) : zero_source;
      ts = step_bioheat(ts, mesh, materials, velocity, source, cfg.dt, bopts, &ws);

      rec.t.push_back(t_next);
      rec.v0.push_back(ps.v0);
      rec.p_total.push_back(ps.p_total);
      rec.p_tissue.push_back(p_tis);
      rec.impedance.push_back(ps.p_total > 0.0 ? ps.v0 * ps.v0 / ps.p_total : 0.0);
      rec.t_max_tissue.push_back(ts.max_tissue_t);
      rec.t_max_blood.push_back(ts.max_blood_t);

      if (next_snapshot > 0.0 && t_next >= next_snapshot - 1e-9) {
        snapshot(t_next);
        next_snapshot += cfg.snapshot_interval;
      }
      if (ts.pop) {
        rec.termination = "pop";
        rec.pop_time = ts.pop->time;
        break;
      }
    }

    stage = "lesion";
    const Isosurface surface = extract_lesion(ts.temperature, mesh);
    LesionConfig lcfg;
    const GeometryConfig g = cfg.geometry();
    // depths are quoted from the local tissue surface: the crater floor
    // under the tip, indented by the full contact displacement
    lcfg.z_ref = g.board_h + g.tissue_h - rec.contact.omega_max;
    rec.lesion = lesion_metrics(surface, ts.temperature, mesh, lcfg);
    rec.lesion.pop_time = rec.pop_time;

    stage = "output";
    if (!cfg.out_dir.empty()) {
      write_timeseries(rec, cfg.out_dir + "/timeseries.csv");
      write_metrics(rec, cfg, cfg.out_dir + "/metrics.csv");
      write_isosurface_vtk(surface, cfg.out_dir + "/lesion.vtk");
      snapshot(ts.time);
      write_manifest(rec, cfg, cfg.out_dir);
    }
  } catch (const std::exception& e) {
    rec.termination = "error";
    rec.error_stage = stage;
    rec.error = e.what();
    if (!cfg.out_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(cfg.out_dir, ec);
      if (!ec) write_manifest(rec, cfg, cfg.out_dir);
    }
  }
  return rec;
}

std::vector<RunRecord> compare_insertions(const SimConfig& base,
                                          const std::vector<double>& forces_gf) {
  if (forces_gf.empty()) throw std::invalid_argument("compare_insertions: no forces given");
  std::vector<RunRecord> records;
  for (const auto mode : {GeometryConfig::Mode::Elastic, GeometryConfig::Mode::Sharp}) {
    for (double f : forces_gf) {
      SimConfig cfg = base;
      cfg.mode = mode;
      cfg.force_gf = f;
      if (!base.out_dir.empty()) {
        std::ostringstream dir;
        dir << base.out_dir << '/' << (mode == GeometryConfig::Mode::Elastic ? "elastic" : "sharp")
            << '_' << format_g17(f) << "gf";
        cfg.out_dir = dir.str();
      }
      records.push_back(run_simulation(cfg));
    }
  }
  return records;
}

void write_comparison_csv(const std::vector<RunRecord>& records,
                          const std::vector<std::string>& labels, const std::string& path) {
  if (records.size() != labels.size())
    throw std::invalid_argument("comparison table: label count mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "label,alpha,p_tissue_target_w,sigma_b_s_m,d_mm,wx_mm,wy_mm,dwx_mm,dwy_mm,"
         "volume_mm3,surface_mm2,t_max_c,pop_time_s,termination,error\n";
  for (size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    std::string sanitized = r.error;
    std::replace(sanitized.begin(), sanitized.end(), ',', ';');
    out << labels[i] << ',' << format_g17(r.split.alpha) << ',' << format_g17(r.split.P_tissue)
        << ',' << format_g17(r.sigma_b) << ',' << format_g17(r.lesion.d) << ','
        << format_g17(r.lesion.wx) << ',' << format_g17(r.lesion.wy) << ','
        << format_g17(r.lesion.dwx) << ',' << format_g17(r.lesion.dwy) << ','
        << format_g17(r.lesion.volume) << ',' << format_g17(r.lesion.surface) << ','
        << format_g17(r.lesion.t_max) << ','
        << (r.pop_time ? format_g17(*r.pop_time) : std::string("nan")) << ',' << r.termination
        << ',' << sanitized << '\n';
  }
}

}  // namespace rfa
