// Axisymmetric Boussinesq problem for a rigid spherical punch on an
// elastic half-space: force -> contact radius, indentation depth and the
// full radial displacement profile of the surface.
#pragma once

namespace rfa {

struct ContactSolution {
  double a = 0.0;              // contact radius [m]
  double omega_max = 0.0;      // maximum vertical displacement [m]
  double R = 0.0;              // indenter radius [m]
  double shear_modulus = 0.0;  // G [Pa]
  double poisson = 0.0;        // nu [-]
};

// Total force carried by a spherical punch at contact radius a:
//   F = G/(1-nu) * ((a^2+R^2) log((R+a)/(R-a)) - 2 a R).
// Strictly increasing in a. Throws std::domain_error unless 0 <= a < R.
double force_from_radius(double a, double R, double G, double nu);

// Inverts force_from_radius by bisection on a in (0, R) to a relative
// force residual of 1e-12, then fills omega_max = (a/2) log((R+a)/(R-a)).
// G is derived from E as E / (2 (1+nu)). Forces that would push a/R
// beyond 0.999 are outside the validity of the punch model and throw.
ContactSolution solve_contact(double force_newtons, double R, double young, double nu);

// Vertical surface displacement at radial distance r from the axis.
// Inside the contact circle the surface follows the sphere,
//   omega(r) = omega_max - (R - sqrt(R^2 - r^2));
// outside it is the Boussinesq integral
//   omega(r) = \int_0^1 chi(t) / sqrt((r/a)^2 - t^2) dt,
//   chi(t) = 2 omega_max / pi - (a t / pi) log((R+at)/(R-at)),
// evaluated by Clenshaw-Curtis quadrature after the substitution
// t = (r/a) sin(theta), which removes the endpoint singularity at r = a.
// Node count starts at 129 and doubles until two successive values agree
// to 1e-10 * omega_max.
double displacement(const ContactSolution& sol, double r);

// Contact depth h = omega_max - omega(a) = R - sqrt(R^2 - a^2): the
// vertical extent of the electrode surface wetted by tissue.
double contact_depth(const ContactSolution& sol);

}  // namespace rfa
