#include "rfa/contact.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rfa {

namespace {

constexpr double kMaxContactRatio = 0.999;

// Clenshaw-Curtis weights for N+1 nodes x_k = cos(k pi / N) on [-1, 1].
// N must be even.
std::vector<double> clenshaw_curtis_weights(int n) {
  std::vector<double> w(n + 1);
  const double pi = std::numbers::pi;
  for (int k = 0; k <= n; ++k) {
    double s = 1.0;
    for (int j = 1; j <= n / 2; ++j) {
      const double b = (j == n / 2) ? 1.0 : 2.0;
      s -= b / (4.0 * j * j - 1.0) * std::cos(2.0 * j * k * pi / n);
    }
    const double c = (k == 0 || k == n) ? 1.0 : 2.0;
    w[k] = c * s / n;
  }
  return w;
}

}  // namespace

double force_from_radius(double a, double R, double G, double nu) {
  if (!(R > 0.0) || !(G > 0.0)) throw std::domain_error("R and G must be positive");
  if (a < 0.0 || a >= R) throw std::domain_error("contact radius must lie in [0, R)");
  if (a == 0.0) return 0.0;
  const double lg = std::log((R + a) / (R - a));
  return G / (1.0 - nu) * ((a * a + R * R) * lg - 2.0 * a * R);
}

ContactSolution solve_contact(double force_newtons, double R, double young, double nu) {
  if (!(force_newtons > 0.0)) throw std::domain_error("force must be positive");
  if (!(young > 0.0)) throw std::domain_error("Young's modulus must be positive");
  if (!(nu > 0.0 && nu < 0.5)) throw std::domain_error("Poisson ratio must lie in (0, 0.5)");
  const double G = young / (2.0 * (1.0 + nu));

  if (force_newtons > force_from_radius(kMaxContactRatio * R, R, G, nu))
    throw std::domain_error("force out of elastic-model range (a/R > 0.999)");

  double lo = 0.0;
  double hi = R * (1.0 - 1e-9);
  [[maybe_unused]] double flo = 0.0;
  [[maybe_unused]] double fhi = force_from_radius(hi, R, G, nu);
  const double tol = 1e-12 * force_newtons;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    assert(flo <= force_newtons && fhi >= force_newtons);
    mid = 0.5 * (lo + hi);
    const double fm = force_from_radius(mid, R, G, nu);
    if (std::abs(fm - force_newtons) <= tol || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * R)
      break;
    if (fm < force_newtons) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }

  ContactSolution sol;
  sol.a = mid;
  sol.R = R;
  sol.shear_modulus = G;
  sol.poisson = nu;
  sol.omega_max = 0.5 * mid * std::log((R + mid) / (R - mid));
  return sol;
}

double displacement(const ContactSolution& sol, double r) {
  if (r < 0.0) throw std::domain_error("radius must be non-negative");
  const double a = sol.a;
  const double R = sol.R;
  if (a <= 0.0) return 0.0;
  if (r <= a) return sol.omega_max - (R - std::sqrt(R * R - r * r));

  const double pi = std::numbers::pi;
  const double q = r / a;
  auto chi = [&](double t) {
    return 2.0 * sol.omega_max / pi - a * t / pi * std::log((R + a * t) / (R - a * t));
  };
  // t = q sin(theta), theta in [0, asin(1/q)]:
  //   integrand chi(t)/sqrt(q^2 - t^2) dt  ->  chi(q sin(theta)) d(theta).
  const double theta_max = std::asin(1.0 / q);
  auto eval = [&](int n) {
    const std::vector<double> w = clenshaw_curtis_weights(n);
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = std::cos(k * pi / n);                 // [-1, 1]
      const double theta = 0.5 * theta_max * (x + 1.0);      // [0, theta_max]
      double t = q * std::sin(theta);
      if (t > 1.0) t = 1.0;  // guard floating-point spill at the endpoint
      sum += w[k] * chi(t);
    }
    return 0.5 * theta_max * sum;
  };

  int n = 128;  // 129 nodes
  double value = eval(n);
  for (int pass = 0; pass < 6; ++pass) {
    n *= 2;
    const double refined = eval(n);
    if (std::abs(refined - value) < 1e-10 * sol.omega_max) return refined;
    value = refined;
  }
  return value;
}

double contact_depth(const ContactSolution& sol) {
  return sol.R - std::sqrt(sol.R * sol.R - sol.a * sol.a);
}

}  // namespace rfa
