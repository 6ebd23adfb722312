// Full-simulation driver: configuration, the three-step time loop
// (flow, potential, bioheat), output writing and the elastic-vs-sharp
// comparison sweep.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfa/bioheat.hpp"
#include "rfa/flow.hpp"
#include "rfa/lesion.hpp"
#include "rfa/mesh.hpp"
#include "rfa/potential.hpp"

namespace rfa {

struct SimConfig {
  double force_gf = 10.0;
  double power = 20.0;     // generator power [W]
  double duration = 30.0;  // [s]
  double r0 = 120.0;       // initial impedance [ohm]
  GeometryConfig::Mode mode = GeometryConfig::Mode::Elastic;

  // HF binds u_b to 0.5 m/s, LF to 0.1 m/s; "custom" keeps blood_velocity.
  std::string protocol = "HF";
  double blood_velocity = 0.5;   // [m/s]
  double saline_ml_min = 17.0;   // pump rate
  enum class FlowSolver { Prescribed, NavierStokes };
  FlowSolver flow_solver = FlowSolver::Prescribed;

  double dt = 0.01;                 // outer time step [s]
  double snapshot_interval = 1.0;   // field snapshot cadence [s], 0 disables

  double h_min = 2.5e-4;
  double h_max = 8.0e-3;
  double growth = 1.35;

  double initial_temperature = 37.0;  // [degC]
  double wall_temperature = 37.0;
  double saline_temperature = 37.0;

  MaterialTable materials;
  CatheterSpec catheter;

  std::string out_dir;  // empty: keep everything in memory

  // Flat key = value text, '#' comments; unknown keys are an error.
  static SimConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  GeometryConfig geometry() const;
  double saline_rate() const;  // [m^3/s]
  double hole_speed() const;   // nominal jet speed, rate over total hole area [m/s]
};

struct RunRecord {
  ContactSolution contact;
  double contact_h = 0.0;  // depth used for the power split [m]
  PowerSplit split;
  double sigma_b = 0.0;
  double v0_initial = 0.0;
  double p0 = 0.0;

  // per-step series, one entry per completed outer step
  std::vector<double> t, v0, p_total, p_tissue, impedance, t_max_tissue, t_max_blood;
  double max_power_deviation = 0.0;  // max |P_total - P0| over the run [W]

  LesionMetrics lesion;
  std::string termination = "completed";  // completed | pop | error
  std::optional<double> pop_time;

  std::string error_stage;  // stage tag when termination == error
  std::string error;
};

// Contact solve, mesh build, power split, board calibration, then the
// time loop with per-step voltage rescaling and pop detection. Stage
// errors are captured in the returned (partial) record, not thrown.
// With out_dir set, writes timeseries.csv, metrics.csv, manifest.json,
// the lesion isosurface and VTK field snapshots.
RunRecord run_simulation(const SimConfig& config);

// Elastic and sharp runs for every force at the base protocol. Output
// directories (when set) gain per-run subdirectories.
std::vector<RunRecord> compare_insertions(const SimConfig& base, const std::vector<double>& forces_gf);

void write_comparison_csv(const std::vector<RunRecord>& records,
                          const std::vector<std::string>& labels, const std::string& path);

// Shortest round-trippable decimal form, used for every CSV number so
// reruns are bit-identical.
std::string format_g17(double v);

}  // namespace rfa
