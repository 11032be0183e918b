#pragma once

// Discrete circle X with small obstacles B removed. The Neumann Laplacian on X \ B is the
// graph Laplacian of the induced subgraph. Identification: J = restriction, J' = extension by
// zero, J1 = J, J'1 = E (linear fill of each gap).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "que/forms.hpp"

namespace que {

struct ObstacleModel {
  int grid_size = 0;  // N, spacing h = 1/N
  std::vector<int> centers;
  double eps = 0.0;
  double alpha = 0.0;
  FormPencil circle;                   // stiffness 1/h per edge, mass h per vertex
  FormPencil complement;               // induced subgraph on X \ B
  std::vector<Eigen::Index> kept;      // complement vertex -> circle vertex
  std::vector<Eigen::Index> obstacle;  // circle vertices in B, ascending

  double spacing() const noexcept { return 1.0 / grid_size; }
  /// n_c x N restriction matrix J.
  Eigen::MatrixXd restriction() const;
};

/// Throws Validation for N < 16, eps < 1/N or a center off the grid; Configuration when
/// centers are not separated by more than 2 eps^alpha or the complement is disconnected.
ObstacleModel build_obstacle_model(int grid_size, std::span<const int> centers, double eps, double alpha);

/// Tight delta in ||f||_{L2(B)} <= delta ||f||_{H1(X)}.
double measure_smallness_delta(const ObstacleModel& model);

struct Extension {
  Eigen::MatrixXd map;  // N x n_c
  double c_ext = 1.0;   // H1(X \ B) -> H1(X) operator norm
};

Extension build_extension(const ObstacleModel& model);

/// Tight constant in ||f||_{H2} <= C ||(Delta_X + 1) f|| with ||f||_{H2}^2 = ||f||^2 + E(f) + ||M^-1 L f||^2.
double elliptic_regularity_constant(const ObstacleModel& model);

struct ObstacleCertificate {
  double delta = 0.0;
  double c_ext = 0.0;
  double c_ell_reg = 0.0;
  double norm_restriction = 0.0;   // ||J||
  double adjoint_defect = 0.0;     // ||J* - J'||
  double right_inverse_defect = 0.0;  // ||1 - J J'||
  double restriction_defect = 0.0;    // sup ||f - J'J f|| / ||f||_H1, bound delta
  double extension_defect = 0.0;      // sup ||(J'1 - J') u|| / ||u||_H1, bound C_ext delta
  double extension_bound = 0.0;
  double closeness = 0.0;             // graph-norm closeness constant
  double closeness_bound = 0.0;       // C_ell.reg C_ext delta
  bool restriction_ok = false;
  bool extension_ok = false;
  bool closeness_ok = false;
};

ObstacleCertificate certify_obstacle(const ObstacleModel& model);

struct ObstacleSweepRow {
  double eps = 0.0;
  double alpha = 0.0;
  ObstacleCertificate cert;
};

/// Single obstacle at `center`, one row per radius.
std::vector<ObstacleSweepRow> obstacle_sweep(int grid_size, int center, std::span<const double> radii, double alpha);

/// Least-squares slope of ln y against ln x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace que
