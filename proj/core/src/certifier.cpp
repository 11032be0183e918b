#include "que/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "que/errors.hpp"
#include "que/linalg.hpp"

namespace que {

namespace {

constexpr double kHypothesisSlack = 1e-12;

Eigen::MatrixXd true_adjoint(const IdentificationPair& pair) {
  return pair.coarse.mass.cwiseInverse().asDiagonal() * pair.embed.transpose() * pair.fine.mass.asDiagonal();
}

// (L + M)^{-1} M, the resolvent at z = -1 of the pencil.
Eigen::MatrixXd unit_resolvent(const FormPencil& p) {
  Eigen::MatrixXd g = p.dense_stiffness();
  g.diagonal() += p.mass;
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Numerical, "L + M is not positive definite");
  return llt.solve(Eigen::MatrixXd(p.mass.asDiagonal()));
}

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double symmetric_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-52 - 1.0; }
};

Eigen::VectorXd random_vector(SplitMix64& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.symmetric_unit();
  return v;
}

void require_unit_interval(double delta, const char* name) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    fail(ErrorKind::Precondition, std::string(name) + " = " + std::to_string(delta) +
                                      " lies outside [0, 1], where transitivity is stated");
  }
}

}  // namespace

QueCertificate certify(const IdentificationPair& pair) {
  const Metric coarse_mass = Metric::mass(pair.coarse);
  const Metric fine_mass = Metric::mass(pair.fine);
  const Metric coarse_energy = Metric::energy(pair.coarse);
  const Metric fine_energy = Metric::energy(pair.fine);

  const Eigen::Index nm = pair.coarse_size();
  const Eigen::Index nf = pair.fine_size();
  const Eigen::MatrixXd& embed = pair.embed;
  const Eigen::MatrixXd sampling = pair.sampling_matrix();

  QueCertificate c;
  c.model = pair.model.kind;
  c.coarse_level = pair.coarse_level;
  c.fine_level = pair.fine_level;
  c.paper_bound = pair.model.theoretical_delta(pair.coarse_level);

  c.delta_a1 = std::max(0.0, weighted_operator_norm(embed, coarse_mass, fine_mass) - 1.0);
  c.delta_a2 = weighted_operator_norm(Eigen::MatrixXd(true_adjoint(pair) - pair.project), fine_mass, coarse_mass);

  c.delta_b1 = weighted_operator_norm(
      Eigen::MatrixXd(Eigen::MatrixXd::Identity(nm, nm) - pair.project * embed), coarse_energy, coarse_mass);
  c.delta_b2 = weighted_operator_norm(
      Eigen::MatrixXd(Eigen::MatrixXd::Identity(nf, nf) - embed * pair.project), fine_energy, fine_mass);
  c.delta_bprime = weighted_operator_norm(
      Eigen::MatrixXd(Eigen::MatrixXd::Identity(nf, nf) - embed * sampling), fine_energy, fine_mass);

  c.delta_c1 = weighted_operator_norm(Eigen::MatrixXd(pair.embed_energy() - embed), coarse_energy, fine_mass);
  c.delta_c2 = weighted_operator_norm(Eigen::MatrixXd(sampling - pair.project), fine_energy, coarse_mass);

  // E~(J1 f, u) - E(f, J'1 u) = f^T (J1^T L~ - L S) u.
  const Eigen::MatrixXd closeness =
      pair.embed_energy().transpose() * pair.fine.stiffness - pair.coarse.stiffness * sampling;
  c.delta_d = bilinear_form_norm(closeness, coarse_energy, fine_energy);

  c.energy_bound_J = weighted_operator_norm(pair.embed_energy(), coarse_energy, fine_energy);
  c.energy_bound_sample = weighted_operator_norm(sampling, fine_energy, coarse_energy);

  c.delta_total = std::max({c.delta_a1, c.delta_a2, c.delta_b1,
                            combine_lemma_b(c.delta_bprime, c.delta_a1, c.delta_c2), c.delta_c1, c.delta_c2,
                            c.delta_d});

  c.flags.embed_energy_bounded = c.energy_bound_J <= 1.0 + c.delta_total + kHypothesisSlack;
  c.flags.sample_energy_bounded = c.energy_bound_sample <= 1.0 + c.delta_total + kHypothesisSlack;
  return c;
}

double closeness_spot_check(const IdentificationPair& pair, std::uint64_t seed, int count) {
  if (count < 0) fail(ErrorKind::Domain, "spot-check count must be non-negative");
  SplitMix64 rng{seed};
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd f = random_vector(rng, pair.coarse_size());
    const Eigen::VectorXd u = random_vector(rng, pair.fine_size());
    const double lhs = std::abs(pair.fine.energy(pair.embed_energy() * f, u) - pair.coarse.energy(f, pair.sample(u)));
    worst = std::max(worst, lhs / (pair.coarse.energy_norm(f) * pair.fine.energy_norm(u)));
  }
  return worst;
}

double combine_lemma_b(double delta_bprime, double delta_a, double delta_c) {
  if (delta_bprime < 0.0 || delta_a < 0.0 || delta_c < 0.0) {
    fail(ErrorKind::Domain, "combine_lemma_b needs non-negative inputs");
  }
  return delta_bprime + (1.0 + delta_a) * delta_c;
}

double delta_hat_from_delta(double delta) {
  if (!(delta >= 0.0 && delta < 2.0)) {
    fail(ErrorKind::Domain, "delta_hat = delta sqrt((2+delta)/(2-delta)) is valid only for 0 <= delta < 2");
  }
  return delta * std::sqrt((2.0 + delta) / (2.0 - delta));
}

double delta_from_delta_hat(double delta_hat) {
  if (!(delta_hat >= 0.0 && delta_hat < 1.0)) {
    fail(ErrorKind::Domain, "delta = delta_hat / sqrt(1 - delta_hat) is valid only for 0 <= delta_hat < 1");
  }
  return delta_hat / std::sqrt(1.0 - delta_hat);
}

CompositionReport compose(const IdentificationPair& first, const QueCertificate& first_cert,
                          const IdentificationPair& second, const QueCertificate& second_cert) {
  require_unit_interval(first_cert.delta_total, "delta");
  require_unit_interval(second_cert.delta_total, "delta~");

  CompositionReport r;
  r.composed = compose_pairs(first, second);
  r.delta_first = first_cert.delta_total;
  r.delta_second = second_cert.delta_total;
  r.theoretical_bound = 14.0 * (r.delta_first + r.delta_second);
  r.hypotheses.embed_energy_bounded = first_cert.energy_bound_J <= 1.0 + r.delta_first + kHypothesisSlack;
  r.hypotheses.sample_energy_bounded =
      second_cert.energy_bound_sample <= 1.0 + r.delta_second + kHypothesisSlack;
  r.certified = certify(r.composed);
  r.within_bound = r.certified.delta_total <= r.theoretical_bound;
  return r;
}

double operator_transitivity_bound(double delta, double delta_tilde) {
  require_unit_interval(delta, "delta");
  require_unit_interval(delta_tilde, "delta~");
  return 5.0 * delta + 5.0 * delta_tilde;
}

OperatorLevelReport operator_level_certificate(const IdentificationPair& pair, const QueCertificate& cert) {
  const Metric coarse_mass = Metric::mass(pair.coarse);
  const Metric fine_mass = Metric::mass(pair.fine);
  const Eigen::Index nm = pair.coarse_size();
  const Eigen::Index nf = pair.fine_size();

  const Eigen::MatrixXd coarse_res = unit_resolvent(pair.coarse);
  const Eigen::MatrixXd fine_res = unit_resolvent(pair.fine);

  OperatorLevelReport r;
  r.norm_embed = weighted_operator_norm(pair.embed, coarse_mass, fine_mass);
  r.adjoint_defect =
      weighted_operator_norm(Eigen::MatrixXd(true_adjoint(pair) - pair.project), fine_mass, coarse_mass);
  r.coarse_resolvent_defect = weighted_operator_norm(
      Eigen::MatrixXd((Eigen::MatrixXd::Identity(nm, nm) - pair.project * pair.embed) * coarse_res), coarse_mass,
      coarse_mass);
  r.fine_resolvent_defect = weighted_operator_norm(
      Eigen::MatrixXd((Eigen::MatrixXd::Identity(nf, nf) - pair.embed * pair.project) * fine_res), fine_mass,
      fine_mass);
  r.resolvent_commutator =
      weighted_operator_norm(Eigen::MatrixXd(fine_res * pair.embed - pair.embed * coarse_res), coarse_mass, fine_mass);
  r.norm_project = weighted_operator_norm(pair.project, fine_mass, coarse_mass);
  r.delta_operator = std::max({std::max(0.0, r.norm_embed - 1.0), r.adjoint_defect, r.coarse_resolvent_defect,
                               r.fine_resolvent_defect, r.resolvent_commutator});

  r.delta_total = cert.delta_total;
  r.commutator_bound = 4.0 * cert.delta_total;
  r.project_bound = 1.0 + 2.0 * cert.delta_total;
  r.commutator_ok = r.resolvent_commutator <= r.commutator_bound * (1.0 + 1e-8);
  r.project_ok = r.norm_project <= r.project_bound * (1.0 + 1e-8);
  return r;
}

GnrsReport gnrs_verdict(std::span<const QueCertificate> certificates) {
  if (certificates.size() < 3) fail(ErrorKind::Domain, "a convergence verdict needs at least 3 certificates");
  GnrsReport r;
  r.model = certificates.front().model;
  for (std::size_t i = 0; i < certificates.size(); ++i) {
    const auto& c = certificates[i];
    if (c.model != r.model) fail(ErrorKind::Domain, "certificates mix models");
    if (i > 0 && c.coarse_level <= certificates[i - 1].coarse_level) {
      fail(ErrorKind::Domain, "certificates must be at strictly increasing levels");
    }
    if (!(c.delta_total > 0.0)) fail(ErrorKind::Domain, "deltas must be positive for a log-slope fit");
    r.levels.push_back(c.coarse_level);
    r.deltas.push_back(c.delta_total);
    r.paper_bounds.push_back(c.paper_bound);
    r.within_paper_bound.push_back(c.delta_total <= c.paper_bound);
  }

  const auto n = static_cast<double>(r.levels.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    mean_x += r.levels[i];
    mean_y += std::log(r.deltas[i]);
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const double dx = r.levels[i] - mean_x;
    sxy += dx * (std::log(r.deltas[i]) - mean_y);
    sxx += dx * dx;
  }
  r.slope_ln = sxy / sxx;
  r.log_base = r.model == ModelKind::Interval ? 2.0 : 5.0;
  r.slope_in_base = r.slope_ln / std::log(r.log_base);

  // Eventually decreasing: strictly decreasing over the last ceil(n/2) transitions.
  const std::size_t transitions = r.deltas.size() - 1;
  const std::size_t tail = (transitions + 1) / 2;
  r.eventually_decreasing = true;
  for (std::size_t i = r.deltas.size() - tail; i < r.deltas.size(); ++i) {
    if (!(r.deltas[i] < r.deltas[i - 1])) r.eventually_decreasing = false;
  }
  r.converges = r.eventually_decreasing && r.slope_ln < 0.0;
  r.verdict = r.converges ? "converges in generalised norm resolvent sense"
                          : "not convergent (delta_m not eventually decreasing)";
  r.tolerance_note =
      "slope bands used by acceptance checks (interval log2-slope in [-1.3,-0.7], gasket log5-slope <= -0.35) "
      "are a tolerance policy, not a theoretical value";
  return r;
}

}  // namespace que
