#include "que/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include <lapacke.h>

#include "que/errors.hpp"

namespace que {

namespace {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
double spectral_norm_impl(const Mat<Scalar>& a) {
  if (a.size() == 0) return 0.0;
  const bool tall = a.rows() >= a.cols();
  const Eigen::Index k = tall ? a.cols() : a.rows();
  Mat<Scalar> gram = Mat<Scalar>::Zero(k, k);
  if (tall) {
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(a.adjoint());
  } else {
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(a);
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "Gram eigenvalue solve failed");
  return std::sqrt(std::max(0.0, es.eigenvalues()(k - 1)));
}

template <typename Scalar>
double weighted_norm_impl(const Mat<Scalar>& a, const Metric& dom, const Metric& cod) {
  if (a.cols() != dom.size() || a.rows() != cod.size()) {
    fail(ErrorKind::Domain, "operator is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " but metrics have sizes dom=" + std::to_string(dom.size()) +
                                ", cod=" + std::to_string(cod.size()));
  }
  return spectral_norm_impl<Scalar>(cod.to_euclidean(dom.from_euclidean_right(a)));
}

}  // namespace

Metric Metric::diagonal(Eigen::VectorXd weights) {
  if (weights.size() > 0 && !(weights.minCoeff() > 0.0)) {
    fail(ErrorKind::Domain, "metric weights must be strictly positive");
  }
  Metric m;
  m.size_ = weights.size();
  m.sqrt_weights_ = weights.cwiseSqrt();
  return m;
}

Metric Metric::gram(const Eigen::MatrixXd& spd) {
  if (spd.rows() != spd.cols()) fail(ErrorKind::Domain, "metric matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Domain, "metric matrix is not positive definite");
  Metric m;
  m.size_ = spd.rows();
  m.factor_ = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());
  return m;
}

Metric Metric::mass(const FormPencil& pencil) { return diagonal(pencil.mass); }

Metric Metric::energy(const FormPencil& pencil) {
  Eigen::MatrixXd g = pencil.dense_stiffness();
  g.diagonal() += pencil.mass;
  return gram(g);
}

Metric Metric::identity(Eigen::Index n) { return diagonal(Eigen::VectorXd::Ones(n)); }

Eigen::MatrixXd Metric::matrix() const {
  if (!factor_) return Eigen::MatrixXd(sqrt_weights_.cwiseAbs2().asDiagonal());
  return (*factor_) * factor_->transpose();
}

double Metric::norm(const Eigen::VectorXd& f) const {
  if (!factor_) return f.cwiseProduct(sqrt_weights_).norm();
  return (factor_->transpose().triangularView<Eigen::Upper>() * f).norm();
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Metric::to_euclidean(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) const {
  if (!factor_) return sqrt_weights_.template cast<Scalar>().asDiagonal() * x;
  if constexpr (std::is_same_v<Scalar, double>) {
    return factor_->transpose().template triangularView<Eigen::Upper>() * x;
  } else {
    const Mat<Scalar> c = factor_->template cast<Scalar>();
    return c.transpose().template triangularView<Eigen::Upper>() * x;
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Metric::from_euclidean_right(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) const {
  if (!factor_) return x * sqrt_weights_.cwiseInverse().template cast<Scalar>().asDiagonal();
  if constexpr (std::is_same_v<Scalar, double>) {
    Mat<Scalar> xt = x.transpose();
    factor_->triangularView<Eigen::Lower>().solveInPlace(xt);
    return xt.transpose();
  } else {
    const Mat<Scalar> c = factor_->template cast<Scalar>();
    Mat<Scalar> xt = x.transpose();
    c.template triangularView<Eigen::Lower>().solveInPlace(xt);
    return xt.transpose();
  }
}

template Eigen::MatrixXd Metric::to_euclidean<double>(const Eigen::MatrixXd&) const;
template Eigen::MatrixXcd Metric::to_euclidean<std::complex<double>>(const Eigen::MatrixXcd&) const;
template Eigen::MatrixXd Metric::from_euclidean_right<double>(const Eigen::MatrixXd&) const;
template Eigen::MatrixXcd Metric::from_euclidean_right<std::complex<double>>(const Eigen::MatrixXcd&) const;

Eigen::MatrixXd Metric::inverse_factor(const Eigen::MatrixXd& x) const {
  if (!factor_) return sqrt_weights_.cwiseInverse().asDiagonal() * x;
  Eigen::MatrixXd out = x;
  factor_->triangularView<Eigen::Lower>().solveInPlace(out);
  return out;
}

double weighted_operator_norm(const Eigen::MatrixXd& a, const Metric& dom, const Metric& cod) {
  return weighted_norm_impl<double>(a, dom, cod);
}

double weighted_operator_norm(const Eigen::MatrixXcd& a, const Metric& dom, const Metric& cod) {
  return weighted_norm_impl<std::complex<double>>(a, dom, cod);
}

double bilinear_form_norm(const Eigen::MatrixXd& b, const Metric& left, const Metric& right) {
  if (b.rows() != left.size() || b.cols() != right.size()) {
    fail(ErrorKind::Domain, "bilinear form dimensions do not match the metrics");
  }
  return spectral_norm(left.inverse_factor(right.from_euclidean_right(b)));
}

double spectral_norm(const Eigen::MatrixXd& a) { return spectral_norm_impl<double>(a); }

double spectral_norm(const Eigen::MatrixXcd& a) { return spectral_norm_impl<std::complex<double>>(a); }

double largest_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) fail(ErrorKind::Domain, "empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigenvalue solve failed");
  return es.eigenvalues()(symmetric.rows() - 1);
}

SymmetricEigen symmetric_eigen(Eigen::MatrixXd symmetric) {
  const auto n = static_cast<lapack_int>(symmetric.rows());
  if (symmetric.rows() != symmetric.cols()) fail(ErrorKind::Domain, "matrix must be square");
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, symmetric.data(), n, out.values.data());
  if (info != 0) fail(ErrorKind::Numerical, "dsyevd failed with info=" + std::to_string(info));
  out.vectors = std::move(symmetric);
  return out;
}

}  // namespace que
