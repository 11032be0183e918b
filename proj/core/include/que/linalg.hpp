#pragma once

// Weighted inner-product spaces and tight operator norms between them.
//
// A Metric is a symmetric positive definite Gram matrix G, either diagonal (a
// mass matrix) or dense (e.g. M + L for the energy norm ||f||_E^2 = ||f||^2 + E(f)).
// With G = C C^T the space (R^n, G) is isometric to Euclidean space via f -> C^T f,
// so sup ||A f||_cod / ||f||_dom = sigma_max(C_cod^T A C_dom^{-T}).

#include <complex>
#include <memory>

#include <Eigen/Dense>

#include "que/forms.hpp"

namespace que {

class Metric {
 public:
  /// Throws Domain when a weight is not strictly positive.
  static Metric diagonal(Eigen::VectorXd weights);
  /// Throws Domain when the matrix is not positive definite.
  static Metric gram(const Eigen::MatrixXd& spd);
  static Metric mass(const FormPencil& pencil);
  /// Energy-norm metric M + L.
  static Metric energy(const FormPencil& pencil);
  static Metric identity(Eigen::Index n);

  Eigen::Index size() const noexcept { return size_; }
  bool is_diagonal() const noexcept { return !factor_; }

  /// Dense Gram matrix (for tests and small problems).
  Eigen::MatrixXd matrix() const;

  double norm(const Eigen::VectorXd& f) const;

  /// C^T X: coordinates of the columns of X in the Euclidean picture.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_euclidean(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) const;

  /// X C^{-T}: pulls a row-space operator back from Euclidean coordinates.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> from_euclidean_right(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) const;

  /// C^{-1} X.
  Eigen::MatrixXd inverse_factor(const Eigen::MatrixXd& x) const;

 private:
  Metric() = default;

  Eigen::Index size_ = 0;
  Eigen::VectorXd sqrt_weights_;                 // diagonal case
  std::shared_ptr<const Eigen::MatrixXd> factor_;  // lower Cholesky factor, dense case
};

/// sup_{f != 0} ||A f||_cod / ||f||_dom. Throws Domain on dimension mismatch.
double weighted_operator_norm(const Eigen::MatrixXd& a, const Metric& dom, const Metric& cod);
double weighted_operator_norm(const Eigen::MatrixXcd& a, const Metric& dom, const Metric& cod);

/// sup |f^T B u| / (||f||_left ||u||_right).
double bilinear_form_norm(const Eigen::MatrixXd& b, const Metric& left, const Metric& right);

/// Largest singular value, through the Gram matrix of the smaller side.
double spectral_norm(const Eigen::MatrixXd& a);
double spectral_norm(const Eigen::MatrixXcd& a);

double largest_eigenvalue(const Eigen::MatrixXd& symmetric);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Full decomposition of a dense symmetric matrix (LAPACK dsyevd). Throws Numerical on failure.
SymmetricEigen symmetric_eigen(Eigen::MatrixXd symmetric);

}  // namespace que
