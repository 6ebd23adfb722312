#include "doctest.h"
#include "rfa/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rfa;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig tiny_config() {
  // coarse and short: exercises every stage, not the physics
  SimConfig cfg;
  cfg.duration = 0.05;
  cfg.h_min = 6e-4;
  cfg.snapshot_interval = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto path = std::filesystem::temp_directory_path() / "rfa_cfg_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "force_gf = 20\n";
    out << "power_w = 35   # trailing comment\n";
    out << "mode = sharp\n";
    out << "protocol = LF\n";
    out << "mesh.h_min = 3e-4\n";
    out << "tissue.sigma = 0.6\n";
    out << "catheter.hole_radius = 0.3e-3\n";
  }
  const SimConfig cfg = SimConfig::from_file(path.string());
  CHECK(cfg.force_gf == 20.0);
  CHECK(cfg.power == 35.0);
  CHECK(cfg.mode == GeometryConfig::Mode::Sharp);
  CHECK(cfg.protocol == "LF");
  CHECK(cfg.blood_velocity == 0.1);  // LF binding
  CHECK(cfg.h_min == 3e-4);
  CHECK(cfg.materials.region(Region::Tissue).sigma0 == 0.6);
  CHECK(cfg.catheter.R_h == 0.3e-3);
  std::filesystem::remove(path);

  SimConfig bad;
  CHECK_THROWS(bad.set("no_such_key", "1"));
  CHECK_THROWS(bad.set("power_w", "banana"));
  CHECK_THROWS(bad.set("mode", "soft"));
  SimConfig hf;
  hf.set("protocol", "HF");
  CHECK(hf.blood_velocity == 0.5);

  CHECK(SimConfig{}.saline_rate() == doctest::Approx(17e-6 / 60.0).epsilon(1e-15));
}

TEST_CASE("zero-power run completes with an empty lesion") {
  SimConfig cfg = tiny_config();
  cfg.power = 0.0;
  cfg.duration = 0.01;
  const RunRecord rec = run_simulation(cfg);
  CHECK(rec.termination == "completed");
  CHECK(rec.v0_initial == 0.0);
  CHECK(rec.lesion.volume == 0.0);
  CHECK(rec.lesion.t_max == doctest::Approx(37.0).epsilon(1e-9));
  CHECK(rec.t.size() == 1);
}

TEST_CASE("invalid config aborts in the config stage") {
  SimConfig cfg = tiny_config();
  cfg.duration = -1.0;
  const RunRecord rec = run_simulation(cfg);
  CHECK(rec.termination == "error");
  CHECK(rec.error_stage == "config");
  CHECK(!rec.error.empty());
}

TEST_CASE("reruns are bit-identical") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "rfa_determinism";
  fs::remove_all(base);
  SimConfig cfg = tiny_config();
  cfg.out_dir = (base / "a").string();
  const RunRecord ra = run_simulation(cfg);
  REQUIRE(ra.termination == "completed");
  cfg.out_dir = (base / "b").string();
  const RunRecord rb = run_simulation(cfg);
  REQUIRE(rb.termination == "completed");

  CHECK(slurp(base / "a/timeseries.csv") == slurp(base / "b/timeseries.csv"));
  CHECK(slurp(base / "a/metrics.csv") == slurp(base / "b/metrics.csv"));
  CHECK(ra.p0 == rb.p0);
  CHECK(ra.sigma_b == rb.sigma_b);
  fs::remove_all(base);
}

TEST_CASE("comparison table emits one row per run") {
  // error rows keep the table intact: impossible force makes the
  // contact stage fail
  SimConfig cfg = tiny_config();
  cfg.power = 0.0;
  cfg.duration = 0.01;
  const std::vector<RunRecord> recs = compare_insertions(cfg, {10.0, 1e6});
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].termination == "completed");
  CHECK(recs[1].termination == "error");
  CHECK(recs[1].error_stage == "contact");

  const auto path = std::filesystem::temp_directory_path() / "rfa_cmp.csv";
  write_comparison_csv(recs, {"e10", "e1e6", "s10", "s1e6"}, path.string());
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);  // header + 4 runs
  std::filesystem::remove(path);
}

TEST_CASE("format_g17 round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-7, 0.0}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
}
