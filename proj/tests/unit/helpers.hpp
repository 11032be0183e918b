#pragma once

#include <random>

#include <Eigen/Dense>

#include "que/fractal.hpp"

namespace testing {

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline que::ExactPoint pt(que::Rational a, que::Rational b = 0) {
  que::ExactPoint p;
  p.coords = {a, b};
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
