#include "doctest.h"
#include "rfa/femcore.hpp"
#include "rfa/mesh.hpp"

#include <cmath>
#include <vector>

using namespace rfa;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> dense_solve_oracle(const SparseOperator& op, std::vector<double> rhs) {
  const int n = op.n;
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) a[i * n + op.col[k]] = op.val[k];
  // plain Gaussian elimination with partial pivoting
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[p * n + j]);
      std::swap(rhs[c], rhs[p]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double m = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= m * a[c * n + j];
      rhs[r] -= m * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * x[j];
    x[r] = s / a[r * n + r];
  }
  return x;
}

std::vector<int> boundary_nodes(const Mesh& mesh) {
  std::vector<char> seen(mesh.num_nodes(), 0);
  for (const auto& f : mesh.facets)
    for (int n : f.n) seen[n] = 1;
  std::vector<int> out;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (seen[n]) out.push_back(n);
  return out;
}

double poisson_l2_error(int n) {
  Mesh mesh = build_box_mesh(n, n, n, 1.0, 1.0, 1.0);
  const std::vector<double> one(mesh.num_cells(), 1.0);
  SparseOperator op = assemble_stiffness(mesh, one);

  auto exact = [](const std::array<double, 3>& p) {
    return std::sin(kPi * p[0]) * std::sin(kPi * p[1]) * std::sin(kPi * p[2]);
  };
  std::vector<double> f(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) f[i] = 3.0 * kPi * kPi * exact(mesh.nodes[i]);
  const SparseOperator mass = assemble_mass(mesh, one);
  std::vector<double> rhs(mesh.num_nodes());
  mass.multiply(f, rhs);

  const std::vector<int> bnodes = boundary_nodes(mesh);
  const std::vector<double> bvals(bnodes.size(), 0.0);
  apply_dirichlet(op, rhs, bnodes, bvals);
  SolveOptions opts;
  opts.tol = 1e-12;
  const std::vector<double> u = solve_linear(op, rhs, nullptr, opts);

  std::vector<double> err(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) err[i] = u[i] - exact(mesh.nodes[i]);
  std::vector<double> merr(mesh.num_nodes());
  mass.multiply(err, merr);
  double l2 = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) l2 += err[i] * merr[i];
  return std::sqrt(l2);
}

}  // namespace

TEST_CASE("mass matrix integrates constants exactly") {
  Mesh mesh = build_box_mesh(3, 4, 5, 0.03, 0.02, 0.05);
  std::vector<double> coeff(mesh.num_cells(), 2.5);
  const SparseOperator consistent = assemble_mass(mesh, coeff);
  const SparseOperator lumped = assemble_mass(mesh, coeff, true);
  const std::vector<double> ones(mesh.num_nodes(), 1.0);
  std::vector<double> y(mesh.num_nodes());
  consistent.multiply(ones, y);
  double total = 0.0, total_lumped = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) total += y[i];
  lumped.multiply(ones, y);
  for (int i = 0; i < mesh.num_nodes(); ++i) total_lumped += y[i];
  const double expected = 2.5 * 0.03 * 0.02 * 0.05;
  CHECK(total == doctest::Approx(expected).epsilon(1e-12));
  CHECK(total_lumped == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("stiffness annihilates constants and reproduces linear energies") {
  Mesh mesh = build_box_mesh(4, 3, 3, 0.04, 0.03, 0.03);
  std::vector<double> coeff(mesh.num_cells(), 1.7);
  const SparseOperator k = assemble_stiffness(mesh, coeff);
  const std::vector<double> ones(mesh.num_nodes(), 1.0);
  std::vector<double> y(mesh.num_nodes());
  k.multiply(ones, y);
  for (int i = 0; i < mesh.num_nodes(); ++i) CHECK(std::abs(y[i]) < 1e-12);

  // energy of u = 2x - z is coeff * |grad u|^2 * V
  std::vector<double> u(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) u[i] = 2.0 * mesh.nodes[i][0] - mesh.nodes[i][2];
  k.multiply(u, y);
  double energy = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) energy += u[i] * y[i];
  CHECK(energy == doctest::Approx(1.7 * 5.0 * 0.04 * 0.03 * 0.03).epsilon(1e-12));

  CHECK_THROWS(assemble_stiffness(mesh, std::vector<double>(mesh.num_cells(), 0.0)));
}

TEST_CASE("iterative solvers match the dense factorization oracle") {
  Mesh mesh = build_box_mesh(3, 3, 3, 0.01, 0.012, 0.009);
  std::vector<double> coeff(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) coeff[c] = 1.0 + 0.3 * std::sin(7.0 * c);
  SparseOperator op = assemble_stiffness(mesh, coeff);
  const std::vector<double> unit(mesh.num_cells(), 1.0);
  SparseOperator mass = assemble_mass(mesh, unit);
  op.axpy_into(mass, 1e3);  // shifted operator, SPD and well conditioned

  std::vector<double> rhs(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) rhs[i] = std::cos(3.0 * i);

  const std::vector<double> x_ref = dense_solve_oracle(op, rhs);
  SolveOptions opts;
  opts.tol = 1e-12;
  const std::vector<double> x_cg = solve_linear(op, rhs, nullptr, opts);

  SparseOperator op_ns = op;
  op_ns.symmetric = false;  // exercise BiCGStab on the same system
  const std::vector<double> x_bi = solve_linear(op_ns, rhs, nullptr, opts);

  double ref_norm = 0.0;
  for (double v : x_ref) ref_norm = std::max(ref_norm, std::abs(v));
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    CHECK(std::abs(x_cg[i] - x_ref[i]) < 1e-9 * ref_norm);
    CHECK(std::abs(x_bi[i] - x_ref[i]) < 1e-8 * ref_norm);
  }
}

TEST_CASE("dirichlet rows hold their values exactly") {
  Mesh mesh = build_box_mesh(3, 3, 3, 0.01, 0.01, 0.01);
  std::vector<double> coeff(mesh.num_cells(), 1.0);
  SparseOperator op = assemble_stiffness(mesh, coeff);
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  const std::vector<int> nodes = boundary_nodes(mesh);
  std::vector<double> values(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) values[i] = mesh.nodes[nodes[i]][0];
  apply_dirichlet(op, rhs, nodes, values);
  const std::vector<double> x = solve_linear(op, rhs);
  for (size_t i = 0; i < nodes.size(); ++i)
    CHECK(x[nodes[i]] == doctest::Approx(values[i]).epsilon(1e-14));
  // harmonic extension of x-linear boundary data is x itself
  for (int i = 0; i < mesh.num_nodes(); ++i)
    CHECK(x[i] == doctest::Approx(mesh.nodes[i][0]).epsilon(2e-7));
}

TEST_CASE("supg tau limits") {
  Mesh mesh = build_box_mesh(2, 2, 2, 0.02, 0.02, 0.02);
  const double kappa = 1e-3;
  // pure diffusion limit
  const double tau0 = supg_tau(mesh, 0, {0.0, 0.0, 0.0}, kappa);
  CHECK(tau0 > 0.0);
  // advection-dominated limit: tau -> h / (2 |u|)
  const std::array<double, 3> u{500.0, 0.0, 0.0};
  const double tau = supg_tau(mesh, 0, u, kappa);
  CHECK(tau > 0.0);
  CHECK(tau < 0.02 / (2.0 * 500.0) * 4.0);
  // scaling in |u|: doubling the speed roughly halves tau
  const double tau2 = supg_tau(mesh, 0, {1000.0, 0.0, 0.0}, kappa);
  CHECK(tau2 == doctest::Approx(tau / 2.0).epsilon(1e-9));
}

TEST_CASE("advection operator is a weighted partition of unity") {
  Mesh mesh = build_box_mesh(3, 3, 3, 0.01, 0.01, 0.01);
  VectorField u(mesh);
  for (auto& v : u.values) v = {0.2, 0.05, -0.1};
  std::vector<double> ca(mesh.num_cells(), 3.0);
  std::vector<double> diff(mesh.num_cells(), 1e-4);
  SparseOperator a = make_pattern(mesh);
  assemble_advection_supg(mesh, u, ca, diff, {}, a);

  // apply to T = x: result sums to ca * u_x * V (the SUPG test-function
  // parts cancel because the basis gradients sum to zero per cell)
  std::vector<double> t(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) t[i] = mesh.nodes[i][0];
  std::vector<double> y(mesh.num_nodes());
  a.multiply(t, y);
  double total = 0.0;
  for (double v : y) total += v;
  CHECK(total == doctest::Approx(3.0 * 0.2 * 0.01 * 0.01 * 0.01).epsilon(1e-10));
}

TEST_CASE("manufactured Poisson solution converges at second order") {
  const double e1 = poisson_l2_error(8);
  const double e2 = poisson_l2_error(16);
  const double e3 = poisson_l2_error(32);
  const double r1 = std::log2(e1 / e2);
  const double r2 = std::log2(e2 / e3);
  CHECK(r1 >= 1.8);
  CHECK(r2 >= 1.8);
}

TEST_CASE("integrate respects the region filter") {
  Mesh mesh = build_box_mesh(2, 2, 4, 0.01, 0.01, 0.04, Region::Tissue);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cell_centroid(c)[2] > 0.02) mesh.cell_region[c] = Region::Blood;
  std::vector<double> one(mesh.num_cells(), 1.0);
  CHECK(integrate(mesh, one) == doctest::Approx(4e-6).epsilon(1e-12));
  CHECK(integrate(mesh, one, Region::Tissue) == doctest::Approx(2e-6).epsilon(1e-12));
  CHECK(integrate(mesh, one, Region::Blood) == doctest::Approx(2e-6).epsilon(1e-12));
  CHECK(integrate(mesh, one, Region::Board) == 0.0);
}
