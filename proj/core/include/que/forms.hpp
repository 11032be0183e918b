#pragma once

// Discrete energy forms E_m(f) = sum_e c_e |f(x)-f(y)|^2 on l^2(V_m, mu_m), harmonic
// extension between consecutive levels, compatibility and resistance metric.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "que/fractal.hpp"

namespace que {

/// Stiffness L (from conductances) and diagonal mass M = diag(mu_m); the Laplacian is the pencil (L, M).
struct FormPencil {
  ModelKind model = ModelKind::Interval;
  int level = 0;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;

  Eigen::Index size() const noexcept { return mass.size(); }
  Eigen::MatrixXd dense_stiffness() const { return Eigen::MatrixXd(stiffness); }

  double energy(const Eigen::VectorXd& f) const;
  double energy(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  double norm(const Eigen::VectorXd& f) const;
  /// ||f||_E^2 = ||f||^2 + E(f).
  double energy_norm(const Eigen::VectorXd& f) const;
};

/// Stiffness kept in exact arithmetic: diagonal sums and one off-diagonal entry per edge.
struct ExactStiffness {
  std::vector<Rational> diagonal;
  std::vector<Edge> off_diagonal;  // entry value is -conductance

  std::vector<Rational> row_sums() const;
};

ExactStiffness assemble_exact(const LevelGraph& graph);
FormPencil assemble(const LevelGraph& graph);

/// Single-level harmonic prolongation (n_fine x n_coarse) from the closed-form rules:
/// interval midpoint = average of the cell endpoints; gasket new vertex = 1/5 opposite
/// corner + 2/5 each adjacent corner.
Eigen::SparseMatrix<double> prolongation(const LevelGraph& coarse, const LevelGraph& fine);

Eigen::VectorXd harmonic_extension(const LevelGraph& coarse, const LevelGraph& fine,
                                   const Eigen::VectorXd& f);
/// Convenience overload that builds levels m and m+1; f is indexed by V_m.
Eigen::VectorXd harmonic_extension(const FractalModel& model, int level, const Eigen::VectorXd& f);

/// Minimiser of E_{m+1}(g) subject to g|V_m = f via a linear solve on the new vertices.
/// Independent of the closed-form rules above.
Eigen::VectorXd harmonic_extension_by_solve(const LevelGraph& coarse, const LevelGraph& fine,
                                            const FormPencil& fine_pencil, const Eigen::VectorXd& f);

/// Schur complement of a symmetric matrix onto the index set `kept` (in the given order).
Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& matrix, std::span<const std::size_t> kept);

/// Relative Frobenius distance between the Schur complement of L_{m+1} onto V_m and L_m.
double schur_compatibility_residual(const FractalModel& model, int level);

/// R(x,y) = 1 / min{E(u) : u(x)=1, u(y)=0}, by a grounded linear solve.
double resistance(const FormPencil& pencil, std::size_t x, std::size_t y);

struct HoelderCheck {
  double lhs = 0.0;  // |u(x)-u(y)|^2
  double rhs = 0.0;  // E(u) R(x,y)
  bool ok = false;
};

HoelderCheck hoelder_check(const FormPencil& pencil, const Eigen::VectorXd& u, std::size_t x,
                           std::size_t y);

}  // namespace que
