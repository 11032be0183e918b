#pragma once

// Tight quasi-unitary-equivalence constants for an identification pair.
//
// Every delta is the exact supremum of one inequality, computed as a weighted operator
// norm between the appropriate spaces: plain mass norms for the Hilbert-space estimates,
// energy norms ||f||_E^2 = ||f||^2 + E(f) wherever a form-domain norm appears on the
// right-hand side.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "que/identification.hpp"

namespace que {

struct HypothesisFlags {
  bool embed_energy_bounded = true;   // ||J1 f||_E~ <= (1 + delta) ||f||_E
  bool sample_energy_bounded = true;  // ||J'1 u||_E <= (1 + delta) ||u||_E~
};

struct QueCertificate {
  ModelKind model = ModelKind::Interval;
  int coarse_level = 0;
  int fine_level = 0;

  double delta_a1 = 0.0;      // max(0, ||J|| - 1)
  double delta_a2 = 0.0;      // ||J* - J'||
  double delta_b1 = 0.0;      // sup ||f - J'J f|| / ||f||_E
  double delta_b2 = 0.0;      // sup ||u - JJ' u|| / ||u||_E~ (reported only)
  double delta_bprime = 0.0;  // sup ||u - J J'1 u|| / ||u||_E~
  double delta_c1 = 0.0;      // sup ||(J1 - J) f|| / ||f||_E
  double delta_c2 = 0.0;      // sup ||(J'1 - J') u|| / ||u||_E~
  double delta_d = 0.0;       // sup |E~(J1 f, u) - E(f, J'1 u)| / (||f||_E ||u||_E~)
  double delta_total = 0.0;
  double paper_bound = 0.0;
  double energy_bound_J = 0.0;       // sup ||J1 f||_E~ / ||f||_E
  double energy_bound_sample = 0.0;  // sup ||J'1 u||_E / ||u||_E~
  HypothesisFlags flags;
};

QueCertificate certify(const IdentificationPair& pair);

/// Max over `count` random pairs (f, u) of |E~(J1 f, u) - E(f, J'1 u)| / (||f||_E ||u||_E~).
/// Entries are uniform in [-1, 1] from a splitmix64 stream, so results do not depend on the standard library.
double closeness_spot_check(const IdentificationPair& pair, std::uint64_t seed, int count);

/// delta' + (1 + delta_a) delta_c. Throws Domain on negative input.
double combine_lemma_b(double delta_bprime, double delta_a, double delta_c);

/// Conversions between the bilinear and the quadratic closeness constants.
/// delta_hat = delta sqrt((2+delta)/(2-delta)) needs delta < 2; delta = delta_hat / sqrt(1 - delta_hat) needs delta_hat < 1.
double delta_hat_from_delta(double delta);
double delta_from_delta_hat(double delta_hat);

struct CompositionReport {
  IdentificationPair composed;
  double delta_first = 0.0;
  double delta_second = 0.0;
  double theoretical_bound = 0.0;  // 14 (delta + delta~)
  QueCertificate certified;
  HypothesisFlags hypotheses;
  bool within_bound = false;
};

/// Throws Domain on mismatched pairs, Precondition when a delta lies outside [0, 1].
CompositionReport compose(const IdentificationPair& first, const QueCertificate& first_cert,
                          const IdentificationPair& second, const QueCertificate& second_cert);

/// 5 delta + 5 delta~ for operator-level certificates; Precondition outside [0, 1].
double operator_transitivity_bound(double delta, double delta_tilde);

struct OperatorLevelReport {
  double norm_embed = 0.0;
  double adjoint_defect = 0.0;           // ||J* - J'||
  double coarse_resolvent_defect = 0.0;  // ||(1 - J'J) R||
  double fine_resolvent_defect = 0.0;    // ||(1 - JJ') R~||
  double resolvent_commutator = 0.0;     // ||R~ J - J R|| at z = -1
  double norm_project = 0.0;             // ||J'||
  double delta_operator = 0.0;           // tight operator-level delta
  double delta_total = 0.0;
  double commutator_bound = 0.0;         // 4 delta
  double project_bound = 0.0;            // 1 + 2 delta
  bool commutator_ok = false;
  bool project_ok = false;
};

OperatorLevelReport operator_level_certificate(const IdentificationPair& pair, const QueCertificate& cert);

struct GnrsReport {
  ModelKind model = ModelKind::Interval;
  std::vector<int> levels;
  std::vector<double> deltas;
  std::vector<double> paper_bounds;
  std::vector<bool> within_paper_bound;
  double slope_ln = 0.0;       // least-squares slope of ln delta_m against m
  double log_base = 0.0;       // 2 (interval) or 5 (gasket)
  double slope_in_base = 0.0;  // slope of log_base delta_m
  bool eventually_decreasing = false;
  bool converges = false;
  std::string verdict;
  std::string tolerance_note;
};

/// Needs at least three certificates of one model at strictly increasing coarse levels.
GnrsReport gnrs_verdict(std::span<const QueCertificate> certificates);

}  // namespace que
