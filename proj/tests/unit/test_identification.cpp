#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "que/errors.hpp"
#include "que/identification.hpp"

using namespace que;
using testing::pt;

TEST_CASE("interval m=0, M=1") {
  const auto p = build_identification(FractalModel::interval(), 0, 1);
  Eigen::MatrixXd j(3, 2);
  j << 1, 0, 0.5, 0.5, 0, 1;
  CHECK((p.embed - j).norm() == 0.0);
  Eigen::Matrix2d jpj;
  jpj << 0.75, 0.25, 0.25, 0.75;
  CHECK((p.project * p.embed - jpj).norm() < 1e-15);
}

TEST_CASE("column splines") {
  const auto p = build_identification(FractalModel::interval(), 1, 2);
  Eigen::VectorXd hat(5);
  hat << 0, 0.5, 1, 0.5, 0;
  CHECK((column_spline(p, pt(Rational(1, 2))) - hat).norm() == 0.0);

  const auto gs = FractalModel::gasket();
  const auto q = build_identification(gs, 0, 1);
  const auto b = boundary_points(gs);
  const Eigen::VectorXd psi = column_spline(q, b[0]);
  auto at = [&](const ExactPoint& x) { return psi(static_cast<Eigen::Index>(q.fine_graph->index_of(x))); };
  CHECK(at(b[0]) == 1.0);
  CHECK(at(midpoint(b[0], b[1])) == doctest::Approx(0.4));
  CHECK(at(midpoint(b[0], b[2])) == doctest::Approx(0.4));
  CHECK(at(midpoint(b[1], b[2])) == doctest::Approx(0.2));
  CHECK(at(b[1]) == 0.0);
  CHECK(at(b[2]) == 0.0);

  try {
    column_spline(p, pt(Rational(1, 4)));
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("pair invariants on random vectors") {
  std::mt19937_64 rng(99);
  const std::pair<FractalModel, std::pair<int, int>> configs[] = {
      {FractalModel::interval(), {0, 3}}, {FractalModel::interval(), {2, 6}}, {FractalModel::gasket(), {0, 2}},
      {FractalModel::gasket(), {1, 3}}};
  for (const auto& [model, levels] : configs) {
    const auto p = build_identification(model, levels.first, levels.second);
    const Eigen::Index nm = p.coarse_size();
    const Eigen::Index nf = p.fine_size();
    CHECK(((p.embed * Eigen::VectorXd::Ones(nm)).array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(((p.project * Eigen::VectorXd::Ones(nf)).array() - 1.0).abs().maxCoeff() < 1e-13);
    CHECK((p.sampling_matrix() * p.embed - Eigen::MatrixXd::Identity(nm, nm)).norm() == 0.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd f = testing::random_vector(rng, nm);
      const Eigen::VectorXd u = testing::random_vector(rng, nf);
      CHECK(std::abs(p.fine.inner(p.embed * f, u) - p.coarse.inner(f, p.project * u)) < 1e-12);
      CHECK(testing::rel_err(p.fine.energy(p.embed * f), p.coarse.energy(f)) < 1e-12);
      CHECK((p.sample(u) - p.sampling_matrix() * u).norm() == 0.0);
    }
  }
}

TEST_CASE("composition consistency") {
  for (auto model : {FractalModel::interval(), FractalModel::gasket()}) {
    const int m = 1;
    const int k = 2;
    const int top = model.kind == ModelKind::Interval ? 5 : 4;
    const auto direct = build_identification(model, m, top);
    const auto chained = compose_pairs(build_identification(model, m, k), build_identification(model, k, top));
    CHECK((direct.embed - chained.embed).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((direct.project - chained.project).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(direct.sample_index == chained.sample_index);
  }
  CHECK_THROWS_AS(compose_pairs(build_identification(FractalModel::interval(), 0, 1),
                                build_identification(FractalModel::interval(), 2, 3)),
                  Error);
}

TEST_CASE("errors and defaults") {
  try {
    build_identification(FractalModel::interval(), 3, 3);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  try {
    build_identification(FractalModel::gasket(), 5, 8);
    FAIL("expected a resource-limit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceLimit);
  }
  CHECK(default_fine_level(FractalModel::interval(), 3) == 8);
  CHECK(default_fine_level(FractalModel::interval(), 5) == 8);
  CHECK(default_fine_level(FractalModel::gasket(), 2) == 5);
  CHECK(default_fine_level(FractalModel::gasket(), 6) == 7);
  const auto id = identity_pair(FractalModel::gasket(), 2);
  CHECK(id.embed.isIdentity());
  CHECK(id.project.isIdentity());
}
