#pragma once

// Generalised eigenproblems L phi = lambda M phi and functions of the Laplacians.
//
// Everything is evaluated in M-orthonormal eigencoordinates. With K = Phi~^T M~ J Phi,
//   ||eta(D~) J - J eta(D)||      = ||diag(eta(lambda~)) K - K diag(eta(lambda))||_2
//   ||eta(D~) - J eta(D) J'||     = ||diag(eta(lambda~)) - K diag(eta(lambda)) K^T||_2
// which are exact at finite dimension.

#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "que/certifier.hpp"

namespace que {

struct SpectralDecomposition {
  ModelKind model = ModelKind::Interval;
  int level = 0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // M-orthonormal columns, first clearly nonzero entry positive
  Eigen::VectorXd mass;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }

  /// eta(Delta) = Phi diag(eta(lambda)) Phi^T M, as an n x n matrix. Needs a full decomposition.
  Eigen::MatrixXd apply(const std::function<double(double)>& eta) const;
  Eigen::MatrixXd heat(double t) const;
  /// 1_(a,b)(Delta).
  Eigen::MatrixXd projection(double a, double b) const;
};

/// Full decomposition. Throws Numerical when the solver fails.
SpectralDecomposition eigensolve(const FormPencil& pencil);
/// Lowest k pairs. Throws Domain when k exceeds the dimension.
SpectralDecomposition eigensolve(const FormPencil& pencil, Eigen::Index k);

/// Per-pencil cache of full decompositions, keyed by (model, level, size). Written once per
/// key, read concurrently afterwards. With a directory set, decompositions also persist on disk;
/// an unreadable or mismatching file is rebuilt with a warning on stderr.
class DecompositionCache {
 public:
  static DecompositionCache& global();

  void set_directory(std::filesystem::path dir);
  std::filesystem::path directory() const;
  std::shared_ptr<const SpectralDecomposition> get(const FormPencil& pencil);
  void clear();

  std::size_t disk_hits() const;
  std::size_t rebuilds() const;

 private:
  using Key = std::tuple<int, int, Eigen::Index>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const SpectralDecomposition>> entries_;
  std::filesystem::path dir_;
  std::size_t disk_hits_ = 0;
  std::size_t rebuilds_ = 0;
};

/// Decompositions of both sides of a pair plus the coupling K = Phi~^T M~ J Phi.
struct SpectralPair {
  const IdentificationPair* pair = nullptr;
  std::shared_ptr<const SpectralDecomposition> coarse;
  std::shared_ptr<const SpectralDecomposition> fine;
  Eigen::MatrixXd coupling;  // n_M x n_m

  /// ||eta(D~) J - J eta(D)|| between the mass norms.
  double commutator_norm(const std::function<std::complex<double>(double)>& eta) const;
  /// ||eta(D~) - J eta(D) J'|| on the fine space.
  double sandwich_norm(const std::function<std::complex<double>(double)>& eta) const;
};

/// The pair must outlive the returned object.
SpectralPair spectral_pair(const IdentificationPair& pair);

// ---------------------------------------------------------------- eigenvalue convergence

enum class Reference { FinestLevel, Analytic };

struct ConvergenceRow {
  int level = 0;
  double eigenvalue = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double paper_delta = 0.0;
  double fitted_constant = 0.0;  // error / paper_delta
};

struct ConvergenceTable {
  ModelKind model = ModelKind::Interval;
  Eigen::Index k = 0;
  Reference reference = Reference::Analytic;
  int reference_level = -1;  // FinestLevel only
  std::vector<ConvergenceRow> rows;
  double log_slope = std::numeric_limits<double>::quiet_NaN();  // ln(error) per level, positive errors only
  double constant_at_coarsest = 0.0;
  bool coarsest_constant_bounds_all = true;
};

/// reference_level < 0 picks max(levels) + 1 capped at the model maximum.
/// Analytic reference (k pi)^2 exists only for the interval; the gasket raises UnsupportedReference.
ConvergenceTable convergence_table(const FractalModel& model, std::span<const int> levels, Eigen::Index k,
                                   Reference reference, int reference_level = -1);

/// Two-sided Hausdorff distance of the spectra restricted to [0, window]. Both empty gives 0,
/// exactly one empty gives +infinity.
double hausdorff_distance(std::span<const double> a, std::span<const double> b, double window);

// ---------------------------------------------------------------- resolvent

struct ResolventConstant {
  double value = 0.0;     // 4 (1 + |z+1| / d)^2
  double distance = 0.0;  // d(z, spec A u spec B)
  double rough_bound = 0.0;
};

/// Throws Domain when z lies within 1e-12 of either spectrum.
ResolventConstant resolvent_constant(std::complex<double> z, std::span<const double> a, std::span<const double> b);

struct BoundCheck {
  double norm = 0.0;
  double bound = 0.0;
  bool ok = false;
};

BoundCheck resolvent_comparison(const SpectralPair& sp, const QueCertificate& cert, std::complex<double> z);

// ---------------------------------------------------------------- spectral projections

struct ProjectionConstants {
  double c_eta = 0.0;
  double c_eta_prime = 0.0;
};

/// C_eta = (4/pi)(b-a+eps)(1+sqrt(1+((b+1)/eps)^2))^2, C'_eta = 5 sqrt(b+1) + 3 C_eta.
/// Throws Domain unless -1 < a < b and eps > 0.
ProjectionConstants projection_constants(double a, double b, double eps);

struct ProjectionReport {
  double a = 0.0;
  double b = 0.0;
  double eps = 0.0;
  ProjectionConstants constants;
  BoundCheck commutator;  // ||1_I(D~) J - J 1_I(D)|| vs C_eta delta
  BoundCheck sandwich;    // ||1_I(D~) - J 1_I(D) J'|| vs C'_eta delta
};

/// Throws IllConditionedWindow when a or b lies within 1e-10 of a spectrum point.
ProjectionReport projection_comparison(const SpectralPair& sp, const QueCertificate& cert, double a, double b);

/// Window (a, b) around the k-th eigenvalue of both spectra, with the ends halfway to the
/// neighbouring eigenvalues (a = -1/2 for k = 0).
std::pair<double, double> isolating_window(const SpectralPair& sp, Eigen::Index k);

// ---------------------------------------------------------------- heat semigroup

/// 12 / (pi cos theta) (1 + 1/sin theta)^2 / t + 5. Throws Domain unless t > 0 and 0 < theta < pi/2.
double heat_constant(double t, double theta);

inline constexpr double kDefaultSectorAngle = 0.78539816339744830962;  // pi/4

/// Throws Domain for t < 0. At t = 0 the bound is +infinity.
BoundCheck heat_comparison(const SpectralPair& sp, const QueCertificate& cert, double t,
                           double theta = kDefaultSectorAngle);

struct HeatTrajectoryRow {
  double t = 0.0;
  double error = 0.0;  // ||u_t - J f_t||, f_0 = J' u_0
  double bound = 0.0;  // C'_{eta_T} delta ||u_0||, T = min(times)
  bool ok = false;
};

/// Throws Domain unless every time is positive.
std::vector<HeatTrajectoryRow> heat_solution_comparison(const SpectralPair& sp, const QueCertificate& cert,
                                                        const Eigen::VectorXd& u0, std::span<const double> times,
                                                        double theta = kDefaultSectorAngle);

// ---------------------------------------------------------------- eigenvectors

struct EigenvectorReport {
  Eigen::Index k = 0;
  Eigen::Index cluster_size = 0;
  double fine_eigenvalue = 0.0;
  double disc_radius = 0.0;  // half the gap to the rest of the fine spectrum
  double energy_error = 0.0;  // max over the fine cluster of min ||J1 Phi - Phi~||_E~, Phi unit in ran 1_D(D)
  double fitted_constant = 0.0;  // energy_error / delta_total
};

/// Throws DegenerateCluster when the disc around lambda~_k does not capture a matching
/// coarse cluster of the same size.
EigenvectorReport eigenvector_comparison(const SpectralPair& sp, const QueCertificate& cert, Eigen::Index k);

}  // namespace que
