// Generic P1 tetrahedral finite-element kernel: operator assembly with
// per-cell coefficients, SUPG stabilization, Dirichlet application,
// preconditioned iterative solvers, element gradients and integrals.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rfa/mesh.hpp"

namespace rfa {

struct ScalarField {
  const Mesh* mesh = nullptr;
  std::vector<double> values;  // one per node

  ScalarField() = default;
  explicit ScalarField(const Mesh& m, double fill = 0.0)
      : mesh(&m), values(m.num_nodes(), fill) {}
};

struct VectorField {
  const Mesh* mesh = nullptr;
  std::vector<std::array<double, 3>> values;  // one per node

  VectorField() = default;
  explicit VectorField(const Mesh& m) : mesh(&m), values(m.num_nodes(), {0.0, 0.0, 0.0}) {}
};

// Compressed sparse row operator on nodal values.
struct SparseOperator {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  bool symmetric = false;

  void clear_values();
  // Reference to entry (i, j); the pair must exist in the pattern.
  double& coeff(int i, int j);
  double coeff_or_zero(int i, int j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  void axpy_into(const SparseOperator& other, double scale);  // val += scale * other.val (same pattern)
};

// Node-adjacency sparsity pattern of the mesh with zeroed values.
SparseOperator make_pattern(const Mesh& mesh);

// Stiffness \int coeff grad(phi_i) . grad(phi_j); coeff piecewise
// constant per cell and strictly positive. Adds into `out`.
void assemble_stiffness(const Mesh& mesh, std::span<const double> cell_coeff, SparseOperator& out);
SparseOperator assemble_stiffness(const Mesh& mesh, std::span<const double> cell_coeff);

// Consistent (or lumped) mass \int coeff phi_i phi_j.
void assemble_mass(const Mesh& mesh, std::span<const double> cell_coeff, SparseOperator& out,
                   bool lumped = false);
SparseOperator assemble_mass(const Mesh& mesh, std::span<const double> cell_coeff, bool lumped = false);

// SUPG stabilization parameter on a cell: tau = h/(2|u|) min(1, Pe/3)
// with Pe = |u| h / (2 kappa) and h the streamline element length.
// Degenerates to h^2/(12 kappa) as |u| -> 0.
double supg_tau(const Mesh& mesh, int cell, const std::array<double, 3>& u, double kappa);

// Advection + reaction with SUPG-modified test functions:
//   \int (phi_i + tau u.grad phi_i) (coeff_adv u.grad phi_j + reaction phi_j).
// coeff_adv is the advective scaling (rho c for the bioheat equation),
// diffusivity enters only through the Peclet number in tau. Empty
// reaction span means zero reaction.
void assemble_advection_supg(const Mesh& mesh, const VectorField& velocity,
                             std::span<const double> coeff_adv,
                             std::span<const double> diffusivity,
                             std::span<const double> reaction, SparseOperator& out);

// SUPG-weighted load vector \int (phi_i + tau u.grad phi_i) source, with
// source piecewise constant per cell.
std::vector<double> supg_source_vector(const Mesh& mesh, const VectorField& velocity,
                                       std::span<const double> coeff_adv,
                                       std::span<const double> diffusivity,
                                       std::span<const double> cell_source);

// Dirichlet rows by row replacement with symmetric column elimination:
// preserves symmetry so CG stays applicable.
void apply_dirichlet(SparseOperator& op, std::vector<double>& rhs,
                     std::span<const int> nodes, std::span<const double> values);

struct SolveOptions {
  double tol = 1e-10;  // relative residual
  int max_iter = 20000;
};

// Jacobi-preconditioned CG for symmetric operators, BiCGStab otherwise.
// Throws a solver error with the final residual on non-convergence.
std::vector<double> solve_linear(const SparseOperator& op, std::span<const double> rhs,
                                 const std::vector<double>* guess = nullptr,
                                 const SolveOptions& opts = {});

// Exact gradient of the P1 interpolant, constant per cell.
std::vector<std::array<double, 3>> element_gradient(const ScalarField& field);

// Midpoint integral of piecewise-constant cell data, optionally
// restricted to one region.
double integrate(const Mesh& mesh, std::span<const double> cell_values,
                 std::optional<Region> filter = std::nullopt);

}  // namespace rfa
