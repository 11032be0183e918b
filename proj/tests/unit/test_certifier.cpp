#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "que/certifier.hpp"
#include "que/errors.hpp"

using namespace que;

namespace {

// Second route for a weighted norm: generalised eigenproblem instead of Cholesky + SVD.
double gen_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g_dom, const Eigen::MatrixXd& g_cod) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * g_cod * a, g_dom);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

QueCertificate fake(ModelKind model, int level, double delta) {
  QueCertificate c;
  c.model = model;
  c.coarse_level = level;
  c.fine_level = level + 1;
  c.delta_total = delta;
  return c;
}

}  // namespace

TEST_CASE("frozen deltas from the numpy oracle") {
  struct Case {
    ModelKind model;
    int m;
    int M;
    double delta;
  };
  const Case cases[] = {
      {ModelKind::Interval, 1, 6, 0.3280842994416032},  {ModelKind::Interval, 2, 7, 0.16469129059534568},
      {ModelKind::Interval, 3, 8, 0.08242807905504451}, {ModelKind::Interval, 2, 8, 0.16473493259780203},
      {ModelKind::Interval, 2, 4, 0.16106204820184752}, {ModelKind::Interval, 4, 8, 0.04118133847735455},
      {ModelKind::Gasket, 1, 4, 0.22945147633696},      {ModelKind::Gasket, 2, 5, 0.1027037617132138},
  };
  for (const auto& c : cases) {
    const auto model = FractalModel::of(c.model);
    const auto cert = certify(build_identification(model, c.m, c.M));
    INFO(to_string(c.model), " ", c.m, " ", c.M);
    CHECK(testing::rel_err(cert.delta_total, c.delta) < 1e-9);
    CHECK(cert.delta_total <= model.theoretical_delta(c.m));
    CHECK(cert.delta_d <= 1e-11);
    CHECK(cert.flags.embed_energy_bounded);
    CHECK(cert.flags.sample_energy_bounded);
  }
  const auto c38 = certify(build_identification(FractalModel::interval(), 3, 8));
  CHECK(testing::rel_err(c38.delta_b1, 0.04154491324007141) < 1e-9);
  CHECK(testing::rel_err(c38.delta_bprime, 0.03979870664469785) < 1e-9);
  CHECK(testing::rel_err(c38.delta_c2, 0.04262937241034667) < 1e-9);
  CHECK(c38.energy_bound_J == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("certificate deltas agree with a generalised-eigenvalue route") {
  const auto p = build_identification(FractalModel::interval(), 1, 3);
  const auto cert = certify(p);
  const Eigen::MatrixXd mm = p.coarse.mass.asDiagonal();
  const Eigen::MatrixXd mf = p.fine.mass.asDiagonal();
  const Eigen::MatrixXd em = mm + p.coarse.dense_stiffness();
  const Eigen::MatrixXd ef = mf + p.fine.dense_stiffness();
  const Eigen::Index nm = p.coarse_size();
  const Eigen::Index nf = p.fine_size();
  const Eigen::MatrixXd s = p.sampling_matrix();
  const Eigen::MatrixXd im = Eigen::MatrixXd::Identity(nm, nm);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(nf, nf);

  CHECK(std::abs(cert.delta_a1 - std::max(0.0, gen_norm(p.embed, mm, mf) - 1.0)) < 1e-10);
  CHECK(std::abs(cert.delta_b1 - gen_norm(im - p.project * p.embed, em, mm)) < 1e-10);
  CHECK(std::abs(cert.delta_b2 - gen_norm(id - p.embed * p.project, ef, mf)) < 1e-10);
  CHECK(std::abs(cert.delta_bprime - gen_norm(id - p.embed * s, ef, mf)) < 1e-10);
  CHECK(std::abs(cert.delta_c2 - gen_norm(s - p.project, ef, mm)) < 1e-10);
  CHECK(cert.delta_c1 == 0.0);
  const double lemma = combine_lemma_b(cert.delta_bprime, cert.delta_a1, cert.delta_c2);
  CHECK(cert.delta_total >= lemma);
  CHECK(cert.delta_total >= cert.delta_b1);
}

TEST_CASE("identity pair certifies to zero") {
  for (auto model : {FractalModel::interval(), FractalModel::gasket()}) {
    const auto cert = certify(identity_pair(model, 2));
    CHECK(cert.delta_total < 1e-13);
    CHECK(cert.delta_d < 1e-13);
  }
}

TEST_CASE("closeness spot checks are at rounding level and seed-deterministic") {
  const auto p = build_identification(FractalModel::gasket(), 1, 3);
  const double a = closeness_spot_check(p, 7, 100);
  CHECK(a <= 1e-11);
  CHECK(a == closeness_spot_check(p, 7, 100));
}

TEST_CASE("scalar helpers") {
  CHECK(combine_lemma_b(0.1, 0.0, 0.2) == doctest::Approx(0.3));
  CHECK(combine_lemma_b(0.1, 0.5, 0.2) == doctest::Approx(0.4));
  CHECK_THROWS_AS(combine_lemma_b(-0.1, 0, 0), Error);

  CHECK(delta_hat_from_delta(1.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(delta_from_delta_hat(0.5) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(delta_hat_from_delta(2.0), Error);
  CHECK_THROWS_AS(delta_from_delta_hat(1.0), Error);
  for (double d = 0.01; d <= 0.5; d += 0.01) {
    CHECK(delta_from_delta_hat(delta_hat_from_delta(d)) >= d);
  }

  CHECK(operator_transitivity_bound(0.1, 0.2) == doctest::Approx(1.5));
  try {
    operator_transitivity_bound(1.5, 0.1);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("composition report") {
  const auto model = FractalModel::interval();
  const auto ab = identity_pair(model, 2);
  const auto bc = identity_pair(model, 2);
  const auto r = compose(ab, fake(ModelKind::Interval, 2, 0.1), bc, fake(ModelKind::Interval, 2, 0.2));
  CHECK(r.theoretical_bound == doctest::Approx(4.2));
  CHECK(r.within_bound);
  CHECK_THROWS_AS(compose(ab, fake(ModelKind::Interval, 2, 1.5), bc, fake(ModelKind::Interval, 2, 0.2)), Error);

  const auto p24 = build_identification(model, 2, 4);
  const auto p48 = build_identification(model, 4, 8);
  const auto c24 = certify(p24);
  const auto c48 = certify(p48);
  const auto chain = compose(p24, c24, p48, c48);
  CHECK(chain.composed.coarse_level == 2);
  CHECK(chain.composed.fine_level == 8);
  CHECK(testing::rel_err(chain.certified.delta_total, 0.16473493259780203) < 1e-9);
  CHECK(delta_hat_from_delta(chain.certified.delta_total) <= chain.theoretical_bound);
}

TEST_CASE("operator-level certificate") {
  const auto p = build_identification(FractalModel::interval(), 3, 8);
  const auto cert = certify(p);
  const auto op = operator_level_certificate(p, cert);
  CHECK(op.resolvent_commutator <= 4.0 * cert.delta_total);
  CHECK(op.commutator_ok);
  CHECK(op.project_ok);
  CHECK(op.norm_project == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(op.delta_operator == doctest::Approx(0.0025915).epsilon(1e-4));

  const auto id = identity_pair(FractalModel::gasket(), 1);
  const auto op0 = operator_level_certificate(id, certify(id));
  CHECK(op0.delta_operator < 1e-13);
}

TEST_CASE("convergence verdict") {
  std::vector<QueCertificate> certs;
  const auto model = FractalModel::interval();
  for (int m = 1; m <= 5; ++m) certs.push_back(certify(build_identification(model, m, default_fine_level(model, m))));
  const auto r = gnrs_verdict(certs);
  CHECK(r.converges);
  CHECK(r.log_base == 2.0);
  CHECK(r.slope_in_base >= -1.3);
  CHECK(r.slope_in_base <= -0.7);
  for (bool ok : r.within_paper_bound) CHECK(ok);

  std::vector<QueCertificate> flat{fake(ModelKind::Gasket, 1, 0.2), fake(ModelKind::Gasket, 2, 0.2),
                                   fake(ModelKind::Gasket, 3, 0.2)};
  const auto f = gnrs_verdict(flat);
  CHECK_FALSE(f.converges);
  CHECK(f.slope_ln == doctest::Approx(0.0));
  CHECK(f.log_base == 5.0);

  std::vector<QueCertificate> halving{fake(ModelKind::Gasket, 1, 0.4), fake(ModelKind::Gasket, 2, 0.08),
                                      fake(ModelKind::Gasket, 3, 0.016)};
  CHECK(gnrs_verdict(halving).slope_in_base == doctest::Approx(-1.0));

  CHECK_THROWS_AS(gnrs_verdict(std::span<const QueCertificate>(flat.data(), 2)), Error);
  flat[1].model = ModelKind::Interval;
  CHECK_THROWS_AS(gnrs_verdict(flat), Error);
  flat[1].model = ModelKind::Gasket;
  flat[2].coarse_level = 2;
  CHECK_THROWS_AS(gnrs_verdict(flat), Error);
}
