#include "que/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "que/errors.hpp"
#include "que/linalg.hpp"

namespace que {

namespace {

int circular_gap(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

FormPencil path_pencil(int n_vertices, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges, double h) {
  FormPencil p;
  p.level = -1;
  std::vector<Eigen::Triplet<double>> trip;
  const double c = 1.0 / h;
  for (auto [i, j] : edges) {
    trip.emplace_back(i, i, c);
    trip.emplace_back(j, j, c);
    trip.emplace_back(i, j, -c);
    trip.emplace_back(j, i, -c);
  }
  p.stiffness.resize(n_vertices, n_vertices);
  p.stiffness.setFromTriplets(trip.begin(), trip.end());
  p.mass = Eigen::VectorXd::Constant(n_vertices, h);
  return p;
}

Eigen::MatrixXd h1_gram(const FormPencil& p) {
  Eigen::MatrixXd g = p.dense_stiffness();
  g.diagonal() += p.mass;
  return g;
}

}  // namespace

Eigen::MatrixXd ObstacleModel::restriction() const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), grid_size);
  for (std::size_t r = 0; r < kept.size(); ++r) j(static_cast<Eigen::Index>(r), kept[r]) = 1.0;
  return j;
}

ObstacleModel build_obstacle_model(int grid_size, std::span<const int> centers, double eps, double alpha) {
  if (grid_size < 16) fail(ErrorKind::Validation, "grid size must be at least 16");
  const double h = 1.0 / grid_size;
  if (!(eps >= h * (1.0 - 1e-12))) fail(ErrorKind::Validation, "obstacle radius must be at least one grid spacing");
  for (int c : centers) {
    if (c < 0 || c >= grid_size) fail(ErrorKind::Validation, "obstacle center " + std::to_string(c) + " is off the grid");
  }
  const double separation = 2.0 * std::pow(eps, alpha);
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      if (!(circular_gap(centers[a], centers[b], grid_size) * h > separation)) {
        fail(ErrorKind::Configuration, "obstacle centers " + std::to_string(centers[a]) + " and " +
                                           std::to_string(centers[b]) + " are not separated by more than 2 eps^alpha");
      }
    }
  }

  ObstacleModel m;
  m.grid_size = grid_size;
  m.centers.assign(centers.begin(), centers.end());
  m.eps = eps;
  m.alpha = alpha;

  std::vector<int> owner(static_cast<std::size_t>(grid_size), -1);
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (int i = 0; i < grid_size; ++i) {
      if (circular_gap(i, centers[a], grid_size) * h <= eps * (1.0 + 1e-12)) {
        if (owner[static_cast<std::size_t>(i)] >= 0) fail(ErrorKind::Configuration, "obstacles overlap");
        owner[static_cast<std::size_t>(i)] = static_cast<int>(a);
      }
    }
  }

  std::vector<Eigen::Index> local(static_cast<std::size_t>(grid_size), -1);
  for (int i = 0; i < grid_size; ++i) {
    if (owner[static_cast<std::size_t>(i)] >= 0) {
      m.obstacle.push_back(i);
    } else {
      local[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(m.kept.size());
      m.kept.push_back(i);
    }
  }
  if (m.kept.empty()) fail(ErrorKind::Configuration, "obstacles cover the whole circle");

  std::vector<std::pair<Eigen::Index, Eigen::Index>> full_edges;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> kept_edges;
  for (int i = 0; i < grid_size; ++i) {
    const int j = (i + 1) % grid_size;
    full_edges.emplace_back(std::min(i, j), std::max(i, j));
    const auto li = local[static_cast<std::size_t>(i)];
    const auto lj = local[static_cast<std::size_t>(j)];
    if (li >= 0 && lj >= 0) kept_edges.emplace_back(std::min(li, lj), std::max(li, lj));
  }
  // A circle minus k disjoint arcs has k components; one path needs n_c - 1 edges.
  const auto nc = static_cast<Eigen::Index>(m.kept.size());
  const bool connected = centers.empty() ? true : static_cast<Eigen::Index>(kept_edges.size()) == nc - 1;
  if (!connected) fail(ErrorKind::Configuration, "the complement of the obstacles is disconnected");

  m.circle = path_pencil(grid_size, full_edges, h);
  m.complement = path_pencil(static_cast<int>(nc), kept_edges, h);
  return m;
}

double measure_smallness_delta(const ObstacleModel& model) {
  if (model.obstacle.empty()) return 0.0;
  const auto nb = static_cast<Eigen::Index>(model.obstacle.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nb, model.grid_size);
  for (Eigen::Index b = 0; b < nb; ++b) r(b, model.obstacle[static_cast<std::size_t>(b)]) = 1.0;
  return weighted_operator_norm(r, Metric::gram(h1_gram(model.circle)),
                                Metric::diagonal(Eigen::VectorXd::Constant(nb, model.spacing())));
}

Extension build_extension(const ObstacleModel& model) {
  const int n = model.grid_size;
  const auto nc = static_cast<Eigen::Index>(model.kept.size());
  Extension e;
  e.map = Eigen::MatrixXd::Zero(n, nc);
  std::vector<Eigen::Index> local(static_cast<std::size_t>(n), -1);
  for (Eigen::Index c = 0; c < nc; ++c) {
    local[static_cast<std::size_t>(model.kept[static_cast<std::size_t>(c)])] = c;
    e.map(model.kept[static_cast<std::size_t>(c)], c) = 1.0;
  }
  // Walk each gap from its left neighbour to its right neighbour around the circle.
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index start = model.kept[static_cast<std::size_t>(c)];
    if (local[static_cast<std::size_t>((start + 1) % n)] >= 0) continue;
    Eigen::Index end = (start + 1) % n;
    int len = 1;
    while (local[static_cast<std::size_t>(end)] < 0) {
      end = (end + 1) % n;
      ++len;
    }
    const Eigen::Index right = local[static_cast<std::size_t>(end)];
    for (int s = 1; s < len; ++s) {
      const Eigen::Index v = (start + s) % n;
      const double t = static_cast<double>(s) / len;
      e.map(v, c) += 1.0 - t;
      e.map(v, right) += t;
    }
  }
  e.c_ext = weighted_operator_norm(e.map, Metric::gram(h1_gram(model.complement)), Metric::gram(h1_gram(model.circle)));
  return e;
}

double elliptic_regularity_constant(const ObstacleModel& model) {
  // With A = M^-1/2 L M^-1/2 the two Gram matrices are M^1/2 (1 + A + A^2) M^1/2 and
  // M^1/2 (1 + A)^2 M^1/2, whose difference is L. Forming either one squares the
  // condition number (about 1e-7 accuracy at N = 256), so work with
  //   C^2 = lambda_max(1 - Y),  Y = (1 + A)^-1 A (1 + A)^-1,
  // where every matrix stays bounded by 1.
  const auto n = static_cast<Eigen::Index>(model.grid_size);
  const Eigen::VectorXd s = model.circle.mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd a = s.asDiagonal() * model.circle.dense_stiffness() * s.asDiagonal();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::LLT<Eigen::MatrixXd> shifted(id + a);
  if (shifted.info() != Eigen::Success) fail(ErrorKind::Numerical, "1 + A is not positive definite");
  const Eigen::MatrixXd left = shifted.solve(a);
  Eigen::MatrixXd y = shifted.solve(Eigen::MatrixXd(left.transpose()));
  y = 0.5 * (y + y.transpose()).eval();
  return std::sqrt(largest_eigenvalue(id - y));
}

ObstacleCertificate certify_obstacle(const ObstacleModel& model) {
  const auto n = static_cast<Eigen::Index>(model.grid_size);
  const auto nc = static_cast<Eigen::Index>(model.kept.size());
  const Metric mass_x = Metric::mass(model.circle);
  const Metric mass_c = Metric::mass(model.complement);
  const Metric h1_x = Metric::gram(h1_gram(model.circle));
  const Metric h1_c = Metric::gram(h1_gram(model.complement));

  const Eigen::MatrixXd j = model.restriction();
  const Eigen::MatrixXd jp = j.transpose();  // extension by zero
  const Eigen::MatrixXd adjoint = model.circle.mass.cwiseInverse().asDiagonal() * j.transpose() *
                                  model.complement.mass.asDiagonal();
  const Extension ext = build_extension(model);

  ObstacleCertificate c;
  c.delta = measure_smallness_delta(model);
  c.c_ext = ext.c_ext;
  c.c_ell_reg = elliptic_regularity_constant(model);
  c.norm_restriction = weighted_operator_norm(j, mass_x, mass_c);
  c.adjoint_defect = weighted_operator_norm(Eigen::MatrixXd(adjoint - jp), mass_c, mass_x);
  c.right_inverse_defect =
      weighted_operator_norm(Eigen::MatrixXd(Eigen::MatrixXd::Identity(nc, nc) - j * jp), mass_c, mass_c);
  c.restriction_defect =
      weighted_operator_norm(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) - jp * j), h1_x, mass_x);
  c.extension_defect = weighted_operator_norm(Eigen::MatrixXd(ext.map - jp), h1_c, mass_x);
  c.extension_bound = c.c_ext * c.delta;

  const Eigen::MatrixXd g = h1_gram(model.circle);
  const Metric graph = Metric::gram(g * model.circle.mass.cwiseInverse().asDiagonal() * g);
  const Eigen::MatrixXd form_defect =
      j.transpose() * model.complement.dense_stiffness() - model.circle.dense_stiffness() * ext.map;
  c.closeness = bilinear_form_norm(form_defect, graph, h1_c);
  c.closeness_bound = c.c_ell_reg * c.c_ext * c.delta;

  constexpr double slack = 1.0 + 1e-8;
  c.restriction_ok = c.restriction_defect <= c.delta * slack + 1e-14;
  c.extension_ok = c.extension_defect <= c.extension_bound * slack + 1e-14;
  c.closeness_ok = c.closeness <= c.closeness_bound * slack + 1e-14;
  return c;
}

std::vector<ObstacleSweepRow> obstacle_sweep(int grid_size, int center, std::span<const double> radii, double alpha) {
  std::vector<ObstacleSweepRow> rows;
  const int centers[] = {center};
  for (double eps : radii) {
    const ObstacleModel m = build_obstacle_model(grid_size, centers, eps, alpha);
    rows.push_back({eps, alpha, certify_obstacle(m)});
  }
  return rows;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::Domain, "slope fit needs at least two matching points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) fail(ErrorKind::Domain, "log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace que
