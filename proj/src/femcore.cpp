#include "rfa/femcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rfa {

void SparseOperator::clear_values() { std::fill(val.begin(), val.end(), 0.0); }

double& SparseOperator::coeff(int i, int j) {
  const int b = row_ptr[i];
  const int e = row_ptr[i + 1];
  auto it = std::lower_bound(col.begin() + b, col.begin() + e, j);
  if (it == col.begin() + e || *it != j) throw std::logic_error("entry outside sparsity pattern");
  return val[it - col.begin()];
}

double SparseOperator::coeff_or_zero(int i, int j) const {
  const int b = row_ptr[i];
  const int e = row_ptr[i + 1];
  auto it = std::lower_bound(col.begin() + b, col.begin() + e, j);
  if (it == col.begin() + e || *it != j) return 0.0;
  return val[it - col.begin()];
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

void SparseOperator::axpy_into(const SparseOperator& other, double scale) {
  if (other.val.size() != val.size()) throw std::logic_error("pattern mismatch in axpy_into");
  for (size_t k = 0; k < val.size(); ++k) val[k] += scale * other.val[k];
}

SparseOperator make_pattern(const Mesh& mesh) {
  const int n = mesh.num_nodes();
  std::vector<std::vector<int>> adj(n);
  for (const auto& cell : mesh.cells)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) adj[cell[a]].push_back(cell[b]);
  SparseOperator op;
  op.n = n;
  op.row_ptr.resize(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    op.row_ptr[i + 1] = op.row_ptr[i] + static_cast<int>(row.size());
  }
  op.col.reserve(op.row_ptr[n]);
  for (int i = 0; i < n; ++i) op.col.insert(op.col.end(), adj[i].begin(), adj[i].end());
  op.val.assign(op.col.size(), 0.0);
  return op;
}

namespace {

// Scatter a 4x4 element matrix into CSR.
void scatter(SparseOperator& op, const std::array<int, 4>& cell, const double ke[4][4]) {
  for (int a = 0; a < 4; ++a) {
    const int i = cell[a];
    const int b0 = op.row_ptr[i];
    const int e0 = op.row_ptr[i + 1];
    for (int b = 0; b < 4; ++b) {
      const int j = cell[b];
      auto it = std::lower_bound(op.col.begin() + b0, op.col.begin() + e0, j);
      op.val[it - op.col.begin()] += ke[a][b];
    }
  }
}

std::array<double, 3> cell_avg_velocity(const VectorField& v, const std::array<int, 4>& cell) {
  std::array<double, 3> u{0.0, 0.0, 0.0};
  for (int a = 0; a < 4; ++a)
    for (int d = 0; d < 3; ++d) u[d] += 0.25 * v.values[cell[a]][d];
  return u;
}

}  // namespace

void assemble_stiffness(const Mesh& mesh, std::span<const double> cell_coeff, SparseOperator& out) {
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double coeff = cell_coeff[c];
    if (!(coeff > 0.0)) throw std::invalid_argument("non-positive stiffness coefficient");
    const double v = mesh.cell_volume[c];
    const auto& g = mesh.cell_grad[c];
    double ke[4][4];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        ke[a][b] = coeff * v * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
    scatter(out, mesh.cells[c], ke);
  }
  out.symmetric = true;
}

SparseOperator assemble_stiffness(const Mesh& mesh, std::span<const double> cell_coeff) {
  SparseOperator op = make_pattern(mesh);
  assemble_stiffness(mesh, cell_coeff, op);
  return op;
}

void assemble_mass(const Mesh& mesh, std::span<const double> cell_coeff, SparseOperator& out,
                   bool lumped) {
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double coeff = cell_coeff[c];
    if (!(coeff > 0.0)) throw std::invalid_argument("non-positive mass coefficient");
    const double v = mesh.cell_volume[c];
    double ke[4][4];
    if (lumped) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) ke[a][b] = (a == b) ? coeff * v / 4.0 : 0.0;
    } else {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) ke[a][b] = coeff * v * ((a == b) ? 0.1 : 0.05);
    }
    scatter(out, mesh.cells[c], ke);
  }
  out.symmetric = true;
}

SparseOperator assemble_mass(const Mesh& mesh, std::span<const double> cell_coeff, bool lumped) {
  SparseOperator op = make_pattern(mesh);
  assemble_mass(mesh, cell_coeff, op, lumped);
  return op;
}

double supg_tau(const Mesh& mesh, int cell, const std::array<double, 3>& u, double kappa) {
  const double umag = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  const double hiso = std::cbrt(6.0 * mesh.cell_volume[cell]);
  if (umag < 1e-14) {
    // limit of h/(2|u|) min(1, |u| h/(6 kappa)) as |u| -> 0
    return kappa > 0.0 ? hiso * hiso / (12.0 * kappa) : 0.0;
  }
  // streamline element length
  double denom = 0.0;
  const auto& g = mesh.cell_grad[cell];
  for (int a = 0; a < 4; ++a)
    denom += std::abs(u[0] * g[a][0] + u[1] * g[a][1] + u[2] * g[a][2]);
  const double h = denom > 0.0 ? 2.0 * umag / denom : hiso;
  const double pe = kappa > 0.0 ? umag * h / (2.0 * kappa) : std::numeric_limits<double>::infinity();
  return h / (2.0 * umag) * std::min(1.0, pe / 3.0);
}

void assemble_advection_supg(const Mesh& mesh, const VectorField& velocity,
                             std::span<const double> coeff_adv,
                             std::span<const double> diffusivity,
                             std::span<const double> reaction, SparseOperator& out) {
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double v = mesh.cell_volume[c];
    const auto& g = mesh.cell_grad[c];
    const std::array<double, 3> u = cell_avg_velocity(velocity, cell);
    const double ca = coeff_adv.empty() ? 1.0 : coeff_adv[c];
    const double r = reaction.empty() ? 0.0 : reaction[c];
    const double kappa = diffusivity.empty() ? 0.0 : diffusivity[c];
    const double tau = supg_tau(mesh, c, u, kappa / std::max(ca, 1e-300));

    double udg[4];
    for (int a = 0; a < 4; ++a) udg[a] = u[0] * g[a][0] + u[1] * g[a][1] + u[2] * g[a][2];

    double ke[4][4];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        // Galerkin advection + streamline stabilization
        double e = ca * udg[b] * (v / 4.0 + tau * udg[a] * v);
        // Galerkin reaction with SUPG-modified test function
        e += r * (v * ((a == b) ? 0.1 : 0.05) + tau * udg[a] * v / 4.0);
        ke[a][b] = e;
      }
    }
    scatter(out, cell, ke);
  }
  out.symmetric = false;
}

std::vector<double> supg_source_vector(const Mesh& mesh, const VectorField& velocity,
                                       std::span<const double> coeff_adv,
                                       std::span<const double> diffusivity,
                                       std::span<const double> cell_source) {
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double v = mesh.cell_volume[c];
    const auto& g = mesh.cell_grad[c];
    const std::array<double, 3> u = cell_avg_velocity(velocity, cell);
    const double ca = coeff_adv.empty() ? 1.0 : coeff_adv[c];
    const double kappa = diffusivity.empty() ? 0.0 : diffusivity[c];
    const double tau = supg_tau(mesh, c, u, kappa / std::max(ca, 1e-300));
    const double q = cell_source[c];
    for (int a = 0; a < 4; ++a) {
      const double udg = u[0] * g[a][0] + u[1] * g[a][1] + u[2] * g[a][2];
      rhs[cell[a]] += q * (v / 4.0 + tau * udg * v);
    }
  }
  return rhs;
}

void apply_dirichlet(SparseOperator& op, std::vector<double>& rhs,
                     std::span<const int> nodes, std::span<const double> values) {
  std::vector<char> is_dirichlet(op.n, 0);
  std::vector<double> bc(op.n, 0.0);
  for (size_t k = 0; k < nodes.size(); ++k) {
    is_dirichlet[nodes[k]] = 1;
    bc[nodes[k]] = values[k];
  }
  // move known columns to the right-hand side, zero rows and columns
  for (int i = 0; i < op.n; ++i) {
    if (is_dirichlet[i]) continue;
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const int j = op.col[k];
      if (is_dirichlet[j]) {
        rhs[i] -= op.val[k] * bc[j];
        op.val[k] = 0.0;
      }
    }
  }
  for (size_t m = 0; m < nodes.size(); ++m) {
    const int i = nodes[m];
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k)
      op.val[k] = (op.col[k] == i) ? 1.0 : 0.0;
    rhs[i] = bc[i];
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

[[noreturn]] void solver_fail(const char* method, double residual, double tol) {
  std::ostringstream msg;
  msg << method << " did not converge: relative residual " << residual << " (tolerance " << tol
      << ")";
  throw std::runtime_error(msg.str());
}

std::vector<double> jacobi_diag(const SparseOperator& op) {
  std::vector<double> d(op.n, 1.0);
  for (int i = 0; i < op.n; ++i) {
    double dii = 0.0;
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k)
      if (op.col[k] == i) dii = op.val[k];
    d[i] = (std::abs(dii) > 1e-300) ? 1.0 / dii : 1.0;
  }
  return d;
}

std::vector<double> solve_cg(const SparseOperator& op, std::span<const double> b,
                             const std::vector<double>* guess, const SolveOptions& opts) {
  const int n = op.n;
  std::vector<double> x = guess ? *guess : std::vector<double>(n, 0.0);
  std::vector<double> r(n), z(n), p(n), ap(n);
  const std::vector<double> d = jacobi_diag(op);
  op.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double bnorm = std::max(norm(b), 1e-300);
  double res = norm(r) / bnorm;
  if (res <= opts.tol) return x;
  for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < opts.max_iter; ++it) {
    op.multiply(p, ap);
    const double pap = dot(p, ap);
    if (!(std::abs(pap) > 1e-300)) break;
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    res = norm(r) / bnorm;
    if (res <= opts.tol) return x;
    for (int i = 0; i < n; ++i) z[i] = d[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  solver_fail("CG", res, opts.tol);
}

std::vector<double> solve_bicgstab(const SparseOperator& op, std::span<const double> b,
                                   const std::vector<double>* guess, const SolveOptions& opts) {
  const int n = op.n;
  std::vector<double> x = guess ? *guess : std::vector<double>(n, 0.0);
  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  const std::vector<double> d = jacobi_diag(op);
  op.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r0 = r;
  const double bnorm = std::max(norm(b), 1e-300);
  double res = norm(r) / bnorm;
  if (res <= opts.tol) return x;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double rho_new = dot(r0, r);
    if (std::abs(rho_new) < 1e-300) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (int i = 0; i < n; ++i) ph[i] = d[i] * p[i];
    op.multiply(ph, v);
    const double r0v = dot(r0, v);
    if (std::abs(r0v) < 1e-300) break;
    alpha = rho / r0v;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm(s) / bnorm <= opts.tol) {
      for (int i = 0; i < n; ++i) x[i] += alpha * ph[i];
      return x;
    }
    for (int i = 0; i < n; ++i) sh[i] = d[i] * s[i];
    op.multiply(sh, t);
    const double tt = dot(t, t);
    if (!(tt > 1e-300)) break;
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    res = norm(r) / bnorm;
    if (res <= opts.tol) return x;
    if (std::abs(omega) < 1e-300) break;
  }
  solver_fail("BiCGStab", res, opts.tol);
}

}  // namespace

std::vector<double> solve_linear(const SparseOperator& op, std::span<const double> rhs,
                                 const std::vector<double>* guess, const SolveOptions& opts) {
  if (static_cast<int>(rhs.size()) != op.n) throw std::invalid_argument("rhs size mismatch");
  return op.symmetric ? solve_cg(op, rhs, guess, opts) : solve_bicgstab(op, rhs, guess, opts);
}

std::vector<std::array<double, 3>> element_gradient(const ScalarField& field) {
  const Mesh& mesh = *field.mesh;
  std::vector<std::array<double, 3>> grad(mesh.num_cells(), {0.0, 0.0, 0.0});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const auto& g = mesh.cell_grad[c];
    for (int a = 0; a < 4; ++a) {
      const double t = field.values[cell[a]];
      for (int d = 0; d < 3; ++d) grad[c][d] += t * g[a][d];
    }
  }
  return grad;
}

double integrate(const Mesh& mesh, std::span<const double> cell_values,
                 std::optional<Region> filter) {
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (filter && mesh.cell_region[c] != *filter) continue;
    sum += cell_values[c] * mesh.cell_volume[c];
  }
  return sum;
}

}  // namespace rfa
