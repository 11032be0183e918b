#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "que/errors.hpp"
#include "que/obstacle.hpp"

using namespace que;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Validation;
}

}  // namespace

TEST_CASE("no obstacle") {
  const std::vector<int> none;
  const auto m = build_obstacle_model(32, none, 1.0 / 32, 0.5);
  CHECK(m.kept.size() == 32);
  CHECK(measure_smallness_delta(m) == 0.0);
  CHECK(build_extension(m).c_ext == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("obstacle geometry and linear fill") {
  const int c64[] = {32};
  const auto m = build_obstacle_model(64, c64, 2.0 / 64, 0.5);
  CHECK(m.obstacle.size() == 5);
  CHECK(m.kept.size() == 59);
  CHECK(m.restriction().rows() == 59);

  const int c16[] = {8};
  const auto s = build_obstacle_model(16, c16, 1.0 / 16, 0.5);
  REQUIRE(s.obstacle == std::vector<Eigen::Index>{7, 8, 9});
  const auto e = build_extension(s);
  // Kept vertex 6 has local index 6, vertex 10 has local index 7.
  CHECK(e.map(7, 6) == doctest::Approx(0.75));
  CHECK(e.map(7, 7) == doctest::Approx(0.25));
  CHECK(e.map(8, 6) == doctest::Approx(0.5));
  CHECK(e.map(9, 7) == doctest::Approx(0.75));
  CHECK((e.map * Eigen::VectorXd::Ones(13) - Eigen::VectorXd::Ones(16)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("smallness delta against a generalised eigenproblem") {
  const int c[] = {20};
  const auto m = build_obstacle_model(40, c, 3.0 / 40, 0.5);
  const double h = m.spacing();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.obstacle.size()), 40);
  for (std::size_t b = 0; b < m.obstacle.size(); ++b) r(static_cast<Eigen::Index>(b), m.obstacle[b]) = 1.0;
  const Eigen::MatrixXd g = Eigen::MatrixXd(m.circle.mass.asDiagonal()) + m.circle.dense_stiffness();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h * r.transpose() * r, g);
  CHECK(testing::rel_err(measure_smallness_delta(m), std::sqrt(es.eigenvalues().maxCoeff())) < 1e-10);
}

TEST_CASE("elliptic regularity constant on the circle") {
  for (int n : {64, 256}) {
    const int c[] = {n / 2};
    CHECK(std::abs(elliptic_regularity_constant(build_obstacle_model(n, c, 4.0 / n, 0.5)) - 1.0) < 1e-10);
  }
}

TEST_CASE("frozen sweep values at N = 256") {
  const double radii[] = {4.0 / 256, 8.0 / 256, 16.0 / 256};
  const auto rows = obstacle_sweep(256, 128, radii, 0.5);
  const double delta[] = {0.19452158626734528, 0.26672827880406363, 0.36999904779119175};
  const double cext[] = {4.883543367147728, 3.6523067076060522, 2.6743518700236493};
  const double defect[] = {0.19795654672941024, 0.2759671913660487, 0.3963556173303848};
  const double close[] = {0.25759305820411343, 0.24540857030183916, 0.2216435022392419};
  std::vector<double> eps;
  std::vector<double> deltas;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = rows[i].cert;
    CHECK(testing::rel_err(c.delta, delta[i]) < 1e-9);
    CHECK(testing::rel_err(c.c_ext, cext[i]) < 1e-9);
    CHECK(testing::rel_err(c.extension_defect, defect[i]) < 1e-9);
    CHECK(testing::rel_err(c.closeness, close[i]) < 1e-9);
    CHECK(c.restriction_ok);
    CHECK(c.extension_ok);
    CHECK(c.closeness_ok);
    CHECK(c.adjoint_defect < 1e-13);
    eps.push_back(rows[i].eps);
    deltas.push_back(c.delta);
  }
  const double slope = log_log_slope(eps, deltas);
  CHECK(slope > 0.35);
  CHECK(slope < 0.65);
}

TEST_CASE("obstacle errors") {
  const int c[] = {8};
  CHECK(kind_of([&] { build_obstacle_model(8, c, 0.2, 0.5); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { build_obstacle_model(64, c, 0.001, 0.5); }) == ErrorKind::Validation);
  const int off[] = {70};
  CHECK(kind_of([&] { build_obstacle_model(64, off, 2.0 / 64, 0.5); }) == ErrorKind::Validation);
  const int close[] = {10, 14};
  CHECK(kind_of([&] { build_obstacle_model(64, close, 2.0 / 64, 0.5); }) == ErrorKind::Configuration);
  const double xs[] = {1.0};
  CHECK(kind_of([&] { log_log_slope(xs, xs); }) == ErrorKind::Domain);
}
