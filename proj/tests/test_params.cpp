#include "doctest.h"
#include "rfa/params.hpp"

#include <stdexcept>

using namespace rfa;

TEST_CASE("grams-force conversion uses standard gravity") {
  CHECK(grams_force_to_newtons(0.0) == 0.0);
  CHECK(grams_force_to_newtons(10.0) == doctest::Approx(0.0980665).epsilon(1e-15));
  CHECK(grams_force_to_newtons(1000.0) == doctest::Approx(9.80665).epsilon(1e-15));
  CHECK_THROWS_AS(grams_force_to_newtons(-1.0), std::domain_error);
}

TEST_CASE("material table defaults") {
  MaterialTable m;
  CHECK(m.region(Region::Blood).rho == 1050.0);
  CHECK(m.region(Region::Blood).c0 == 3617.0);
  CHECK(m.region(Region::Blood).k0 == 0.52);
  CHECK(m.region(Region::Blood).sigma0 == 0.748);
  CHECK(m.region(Region::Blood).kinematic_viscosity == 2.52e-6);
  CHECK(m.region(Region::Tissue).rho == 1076.0);
  CHECK(m.region(Region::Tissue).c0 == 3017.0);
  CHECK(m.region(Region::Tissue).k0 == 0.518);
  CHECK(m.region(Region::Tissue).sigma0 == 0.54);
  CHECK(m.region(Region::Tissue).poisson == 0.499);
  CHECK(m.region(Region::Tissue).young == 75e3);
  CHECK(m.region(Region::Electrode).rho == 21500.0);
  CHECK(m.region(Region::Electrode).sigma0 == 4.6e6);
  CHECK(m.region(Region::Thermistor).k0 == 0.038);
  // board starts from the tissue thermal state
  CHECK(m.region(Region::Board).rho == m.region(Region::Tissue).rho);
  CHECK(m.region(Region::Board).c0 == m.region(Region::Tissue).c0);
  CHECK(m.region(Region::Board).k0 == m.region(Region::Tissue).k0);
}

TEST_CASE("tissue coefficient laws are linear around 37 degC") {
  MaterialTable m;
  const Coefficients at37 = m.eval_coefficients(Region::Tissue, 37.0);
  CHECK(at37.c == doctest::Approx(3017.0).epsilon(1e-14));
  CHECK(at37.k == doctest::Approx(0.518).epsilon(1e-14));
  CHECK(at37.sigma == doctest::Approx(0.54).epsilon(1e-14));

  const Coefficients at60 = m.eval_coefficients(Region::Tissue, 60.0);
  CHECK(at60.c == doctest::Approx(3017.0 * (1.0 - 0.0042 * 23.0)).epsilon(1e-14));
  CHECK(at60.k == doctest::Approx(0.518 * (1.0 - 0.0005 * 23.0)).epsilon(1e-14));
  CHECK(at60.sigma == doctest::Approx(0.54 * (1.0 + 0.015 * 23.0)).epsilon(1e-14));

  // clamped at 1% of the 37 degC value far outside the fitted range
  const Coefficients hot = m.eval_coefficients(Region::Tissue, 5000.0);
  CHECK(hot.c == doctest::Approx(0.01 * 3017.0).epsilon(1e-14));
  CHECK(hot.c > 0.0);
  const Coefficients cold = m.eval_coefficients(Region::Tissue, -5000.0);
  CHECK(cold.sigma == doctest::Approx(0.01 * 0.54).epsilon(1e-14));

  // every other region ignores temperature
  for (Region r : {Region::Blood, Region::Electrode, Region::Thermistor}) {
    const Coefficients a = m.eval_coefficients(r, 37.0);
    const Coefficients b = m.eval_coefficients(r, 90.0);
    CHECK(a.c == b.c);
    CHECK(a.k == b.k);
    CHECK(a.sigma == b.sigma);
  }
}

TEST_CASE("board conductivity is settable") {
  MaterialTable m;
  m.set_board_sigma(0.123);
  CHECK(m.board_sigma() == 0.123);
  CHECK(m.eval_coefficients(Region::Board, 80.0).sigma == 0.123);
}
