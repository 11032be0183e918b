#include "que/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <string>

#include "que/errors.hpp"
#include "que/linalg.hpp"
#include "que/serialize.hpp"

namespace que {

namespace {

using Cplx = std::complex<double>;

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double scale = vectors.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-8 * scale) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

double min_distance(Cplx z, std::span<const double> spec) {
  double d = std::numeric_limits<double>::infinity();
  for (double l : spec) d = std::min(d, std::abs(z - Cplx(l, 0.0)));
  return d;
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double spectrum_distance(double x, const SpectralPair& sp) {
  return std::min(min_distance(x, as_span(sp.coarse->eigenvalues)), min_distance(x, as_span(sp.fine->eigenvalues)));
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// min ||A c - b|| over ||c|| = 1, given H = A^T A, g = A^T b and ||b||^2.
double unit_constrained_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, double b_sq) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::VectorXd gp = es.eigenvectors().transpose() * g;
  const Eigen::Index d = lam.size();
  auto coeffs = [&](double mu) {
    Eigen::VectorXd c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = gp(i) / (lam(i) - mu);
    return c;
  };
  const double lmin = lam(0);
  Eigen::VectorXd c;
  const double tiny = 1e-14 * std::max(1.0, std::abs(lmin));
  const bool hard = std::abs(gp(0)) <= 1e-14 * std::max(1.0, gp.norm());
  if (hard) {
    // Hard case: fill the remainder along the lowest eigendirection.
    Eigen::VectorXd rest = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 1; i < d; ++i) rest(i) = gp(i) / (lam(i) - lmin + tiny);
    if (rest.norm() <= 1.0) {
      rest(0) = std::sqrt(1.0 - rest.squaredNorm());
      c = rest;
    }
  }
  if (c.size() == 0) {
    double hi = lmin - tiny;
    double lo = lmin - 1.0;
    while (coeffs(lo).norm() > 1.0) lo = lmin - 2.0 * (lmin - lo);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (coeffs(mid).norm() > 1.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    c = coeffs(0.5 * (lo + hi));
    c.normalize();
  }
  const double value = c.dot(lam.cwiseProduct(c)) - 2.0 * gp.dot(c) + b_sq;
  return std::sqrt(std::max(0.0, value));
}

}  // namespace

Eigen::MatrixXd SpectralDecomposition::apply(const std::function<double(double)>& eta) const {
  if (eigenvectors.cols() != eigenvectors.rows()) {
    fail(ErrorKind::Precondition, "functional calculus needs a full decomposition");
  }
  Eigen::VectorXd values(size());
  for (Eigen::Index i = 0; i < size(); ++i) values(i) = eta(eigenvalues(i));
  return eigenvectors * values.asDiagonal() * eigenvectors.transpose() * mass.asDiagonal();
}

Eigen::MatrixXd SpectralDecomposition::heat(double t) const {
  return apply([t](double l) { return std::exp(-t * l); });
}

Eigen::MatrixXd SpectralDecomposition::projection(double a, double b) const {
  return apply([a, b](double l) { return (l > a && l < b) ? 1.0 : 0.0; });
}

SpectralDecomposition eigensolve(const FormPencil& pencil) {
  const Eigen::VectorXd inv_sqrt = pencil.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = inv_sqrt.asDiagonal() * pencil.dense_stiffness() * inv_sqrt.asDiagonal();
  a = 0.5 * (a + a.transpose()).eval();
  SymmetricEigen es = symmetric_eigen(std::move(a));
  SpectralDecomposition d;
  d.model = pencil.model;
  d.level = pencil.level;
  d.eigenvalues = std::move(es.values);
  d.eigenvectors = inv_sqrt.asDiagonal() * es.vectors;
  d.mass = pencil.mass;
  // The dense solver's eigenvalues carry an absolute error of about eps * lambda_max (5e-10 for the
  // constants at gasket level 7). Rayleigh quotients against the sparse pencil are second-order accurate.
  const Eigen::MatrixXd l_phi = pencil.stiffness * d.eigenvectors;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) {
    const auto phi = d.eigenvectors.col(k);
    d.eigenvalues(k) = phi.dot(l_phi.col(k)) / phi.dot(pencil.mass.cwiseProduct(phi));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.eigenvalues.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return d.eigenvalues(x) < d.eigenvalues(y); });
  if (!std::is_sorted(order.begin(), order.end())) {
    const Eigen::VectorXd values = d.eigenvalues;
    const Eigen::MatrixXd vectors = d.eigenvectors;
    for (std::size_t k = 0; k < order.size(); ++k) {
      d.eigenvalues(static_cast<Eigen::Index>(k)) = values(order[k]);
      d.eigenvectors.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
    }
  }
  fix_signs(d.eigenvectors);
  return d;
}

SpectralDecomposition eigensolve(const FormPencil& pencil, Eigen::Index k) {
  if (k < 0 || k > pencil.size()) {
    fail(ErrorKind::Domain, "requested " + std::to_string(k) + " eigenpairs of a pencil of dimension " +
                                std::to_string(pencil.size()));
  }
  SpectralDecomposition d = eigensolve(pencil);
  d.eigenvalues.conservativeResize(k);
  d.eigenvectors.conservativeResize(Eigen::NoChange, k);
  return d;
}

DecompositionCache& DecompositionCache::global() {
  static DecompositionCache cache;
  return cache;
}

void DecompositionCache::set_directory(std::filesystem::path dir) {
  std::lock_guard lock(mutex_);
  dir_ = std::move(dir);
}

std::filesystem::path DecompositionCache::directory() const {
  std::lock_guard lock(mutex_);
  return dir_;
}

std::shared_ptr<const SpectralDecomposition> DecompositionCache::get(const FormPencil& pencil) {
  std::lock_guard lock(mutex_);
  const Key key{static_cast<int>(pencil.model), pencil.level, pencil.size()};
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;

  std::shared_ptr<const SpectralDecomposition> value;
  std::filesystem::path file;
  const std::uint64_t fp = pencil_fingerprint(pencil);
  if (!dir_.empty()) {
    file = dir_ / ("eig-" + std::string(to_string(pencil.model)) + "-" + std::to_string(pencil.level) + ".bin");
    if (std::filesystem::exists(file)) {
      if (auto loaded = read_decomposition(file, fp)) {
        value = std::make_shared<const SpectralDecomposition>(std::move(*loaded));
        ++disk_hits_;
      } else {
        std::cerr << "warning: cache file " << file.string() << " is unusable; rebuilding\n";
        ++rebuilds_;
      }
    }
  }
  if (!value) {
    value = std::make_shared<const SpectralDecomposition>(eigensolve(pencil));
    if (!file.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir_, ec);
      write_decomposition(file, *value, fp);
    }
  }
  entries_.emplace(key, value);
  return value;
}

void DecompositionCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::size_t DecompositionCache::disk_hits() const {
  std::lock_guard lock(mutex_);
  return disk_hits_;
}

std::size_t DecompositionCache::rebuilds() const {
  std::lock_guard lock(mutex_);
  return rebuilds_;
}

double SpectralPair::commutator_norm(const std::function<Cplx(double)>& eta) const {
  const Eigen::Index nf = coupling.rows();
  const Eigen::Index nc = coupling.cols();
  Eigen::VectorXcd ef(nf);
  Eigen::VectorXcd ec(nc);
  for (Eigen::Index i = 0; i < nf; ++i) ef(i) = eta(fine->eigenvalues(i));
  for (Eigen::Index j = 0; j < nc; ++j) ec(j) = eta(coarse->eigenvalues(j));
  Eigen::MatrixXcd m(nf, nc);
  for (Eigen::Index j = 0; j < nc; ++j) {
    for (Eigen::Index i = 0; i < nf; ++i) m(i, j) = (ef(i) - ec(j)) * coupling(i, j);
  }
  return spectral_norm(m);
}

double SpectralPair::sandwich_norm(const std::function<Cplx(double)>& eta) const {
  const Eigen::Index nf = coupling.rows();
  const Eigen::Index nc = coupling.cols();
  Eigen::VectorXcd ec(nc);
  for (Eigen::Index j = 0; j < nc; ++j) ec(j) = eta(coarse->eigenvalues(j));
  const Eigen::MatrixXcd kc = coupling.cast<Cplx>();
  Eigen::MatrixXcd m = -(kc * ec.asDiagonal() * kc.transpose());
  for (Eigen::Index i = 0; i < nf; ++i) m(i, i) += eta(fine->eigenvalues(i));
  return spectral_norm(m);
}

SpectralPair spectral_pair(const IdentificationPair& pair) {
  SpectralPair sp;
  sp.pair = &pair;
  auto& cache = DecompositionCache::global();
  sp.coarse = cache.get(pair.coarse);
  sp.fine = pair.fine_level == pair.coarse_level ? sp.coarse : cache.get(pair.fine);
  const Eigen::MatrixXd j_phi = pair.embed * sp.coarse->eigenvectors;
  sp.coupling = sp.fine->eigenvectors.transpose() * (pair.fine.mass.asDiagonal() * j_phi);
  return sp;
}

ConvergenceTable convergence_table(const FractalModel& model, std::span<const int> levels, Eigen::Index k,
                                   Reference reference, int reference_level) {
  if (levels.empty()) fail(ErrorKind::Domain, "no levels requested");
  ConvergenceTable t;
  t.model = model.kind;
  t.k = k;
  t.reference = reference;

  double ref_value = 0.0;
  if (reference == Reference::Analytic) {
    if (model.kind != ModelKind::Interval) {
      fail(ErrorKind::UnsupportedReference, "no analytic limit spectrum for the gasket; use the finest-level reference");
    }
    ref_value = std::pow(static_cast<double>(k) * std::numbers::pi, 2);
  } else {
    const int top = *std::max_element(levels.begin(), levels.end());
    t.reference_level = reference_level >= 0 ? reference_level : std::min(top + 1, model.max_level);
    const FormPencil ref = assemble(build_level(model, t.reference_level));
    auto d = DecompositionCache::global().get(ref);
    if (k >= d->size()) fail(ErrorKind::Domain, "k exceeds the reference dimension");
    ref_value = d->eigenvalues(k);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (int m : levels) {
    const FormPencil p = assemble(build_level(model, m));
    if (k >= p.size()) {
      fail(ErrorKind::Domain, "k = " + std::to_string(k) + " exceeds the dimension at level " + std::to_string(m));
    }
    auto d = DecompositionCache::global().get(p);
    ConvergenceRow row;
    row.level = m;
    row.eigenvalue = d->eigenvalues(k);
    row.reference = ref_value;
    row.error = std::abs(row.eigenvalue - ref_value);
    row.paper_delta = model.theoretical_delta(m);
    row.fitted_constant = row.error / row.paper_delta;
    if (row.error > 0.0) {
      xs.push_back(m);
      ys.push_back(std::log(row.error));
    }
    t.rows.push_back(row);
  }
  t.log_slope = least_squares_slope(xs, ys);
  t.constant_at_coarsest = t.rows.front().fitted_constant;
  for (const auto& row : t.rows) {
    if (row.error > t.constant_at_coarsest * row.paper_delta * (1.0 + 1e-12)) t.coarsest_constant_bounds_all = false;
  }
  return t;
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b, double window) {
  std::vector<double> wa;
  std::vector<double> wb;
  for (double x : a) {
    if (x >= 0.0 && x <= window) wa.push_back(x);
  }
  for (double x : b) {
    if (x >= 0.0 && x <= window) wb.push_back(x);
  }
  if (wa.empty() && wb.empty()) return 0.0;
  if (wa.empty() || wb.empty()) return std::numeric_limits<double>::infinity();
  auto one_sided = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(wa, wb), one_sided(wb, wa));
}

ResolventConstant resolvent_constant(Cplx z, std::span<const double> a, std::span<const double> b) {
  ResolventConstant r;
  r.distance = std::min(min_distance(z, a), min_distance(z, b));
  if (r.distance <= 1e-12) fail(ErrorKind::Domain, "z lies on the spectrum");
  const double zp1 = std::abs(z + 1.0);
  r.value = 4.0 * std::pow(1.0 + zp1 / r.distance, 2);
  if (z.real() >= 0.0) {
    r.rough_bound = z.imag() == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 + zp1 / std::abs(z.imag());
  } else {
    r.rough_bound = 1.0 + zp1 / std::abs(z);
  }
  return r;
}

BoundCheck resolvent_comparison(const SpectralPair& sp, const QueCertificate& cert, Cplx z) {
  const ResolventConstant c = resolvent_constant(z, as_span(sp.coarse->eigenvalues), as_span(sp.fine->eigenvalues));
  BoundCheck r;
  r.norm = sp.commutator_norm([z](double l) { return 1.0 / (Cplx(l, 0.0) - z); });
  r.bound = c.value * cert.delta_total;
  r.ok = r.norm <= r.bound * (1.0 + 1e-8);
  return r;
}

ProjectionConstants projection_constants(double a, double b, double eps) {
  if (!(a > -1.0 && a < b && eps > 0.0)) fail(ErrorKind::Domain, "projection constants need -1 < a < b and eps > 0");
  ProjectionConstants c;
  const double q = (b + 1.0) / eps;
  c.c_eta = 4.0 / std::numbers::pi * (b - a + eps) * std::pow(1.0 + std::sqrt(1.0 + q * q), 2);
  c.c_eta_prime = 5.0 * std::sqrt(b + 1.0) + 3.0 * c.c_eta;
  return c;
}

ProjectionReport projection_comparison(const SpectralPair& sp, const QueCertificate& cert, double a, double b) {
  ProjectionReport r;
  r.a = a;
  r.b = b;
  r.eps = std::min(spectrum_distance(a, sp), spectrum_distance(b, sp));
  if (r.eps <= 1e-10) fail(ErrorKind::IllConditionedWindow, "window end lies on the spectrum");
  r.constants = projection_constants(a, b, r.eps);
  auto indicator = [a, b](double l) { return Cplx((l > a && l < b) ? 1.0 : 0.0, 0.0); };
  r.commutator.norm = sp.commutator_norm(indicator);
  r.commutator.bound = r.constants.c_eta * cert.delta_total;
  r.commutator.ok = r.commutator.norm <= r.commutator.bound * (1.0 + 1e-8);
  r.sandwich.norm = sp.sandwich_norm(indicator);
  r.sandwich.bound = r.constants.c_eta_prime * cert.delta_total;
  r.sandwich.ok = r.sandwich.norm <= r.sandwich.bound * (1.0 + 1e-8);
  return r;
}

std::pair<double, double> isolating_window(const SpectralPair& sp, Eigen::Index k) {
  const auto& lc = sp.coarse->eigenvalues;
  const auto& lf = sp.fine->eigenvalues;
  if (k < 0 || k + 1 >= lc.size()) fail(ErrorKind::Domain, "no isolating window for this index");
  const double a = k == 0 ? -0.5 : 0.5 * (std::max(lc(k - 1), lf(k - 1)) + std::min(lc(k), lf(k)));
  const double b = 0.5 * (std::max(lc(k), lf(k)) + std::min(lc(k + 1), lf(k + 1)));
  if (!(a < b)) fail(ErrorKind::IllConditionedWindow, "eigenvalue k is not isolated in both spectra");
  return {a, b};
}

double heat_constant(double t, double theta) {
  if (!(t > 0.0)) fail(ErrorKind::Domain, "heat constant needs t > 0");
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) fail(ErrorKind::Domain, "sector angle must lie in (0, pi/2)");
  return 12.0 / (std::numbers::pi * std::cos(theta)) * std::pow(1.0 + 1.0 / std::sin(theta), 2) / t + 5.0;
}

BoundCheck heat_comparison(const SpectralPair& sp, const QueCertificate& cert, double t, double theta) {
  if (t < 0.0) fail(ErrorKind::Domain, "heat time must be non-negative");
  BoundCheck r;
  r.norm = sp.commutator_norm([t](double l) { return Cplx(std::exp(-t * l), 0.0); });
  r.bound = t == 0.0 ? std::numeric_limits<double>::infinity() : heat_constant(t, theta) * cert.delta_total;
  r.ok = r.norm <= r.bound * (1.0 + 1e-8);
  return r;
}

std::vector<HeatTrajectoryRow> heat_solution_comparison(const SpectralPair& sp, const QueCertificate& cert,
                                                        const Eigen::VectorXd& u0, std::span<const double> times,
                                                        double theta) {
  if (times.empty()) fail(ErrorKind::Domain, "no times requested");
  const double t_min = *std::min_element(times.begin(), times.end());
  if (!(t_min > 0.0)) fail(ErrorKind::Domain, "trajectory times must be positive");
  if (u0.size() != sp.fine->size()) fail(ErrorKind::Domain, "u0 does not live on the fine space");
  const Eigen::VectorXd coords = sp.fine->eigenvectors.transpose() * (sp.fine->mass.asDiagonal() * u0);
  const Eigen::VectorXd coarse0 = sp.coupling.transpose() * coords;
  const double bound = heat_constant(t_min, theta) * cert.delta_total * coords.norm();
  std::vector<HeatTrajectoryRow> rows;
  for (double t : times) {
    const Eigen::VectorXd ut = (-t * sp.fine->eigenvalues).array().exp().matrix().cwiseProduct(coords);
    const Eigen::VectorXd ft = (-t * sp.coarse->eigenvalues).array().exp().matrix().cwiseProduct(coarse0);
    HeatTrajectoryRow row;
    row.t = t;
    row.error = (ut - sp.coupling * ft).norm();
    row.bound = bound;
    row.ok = row.error <= bound * (1.0 + 1e-8) + 1e-12;
    rows.push_back(row);
  }
  return rows;
}

EigenvectorReport eigenvector_comparison(const SpectralPair& sp, const QueCertificate& cert, Eigen::Index k) {
  const auto& lf = sp.fine->eigenvalues;
  const auto& lc = sp.coarse->eigenvalues;
  if (k < 0 || k >= lc.size()) fail(ErrorKind::Domain, "k exceeds the coarse dimension");
  const double center = lf(k);
  const double tol = 1e-8 * (1.0 + std::abs(center));
  std::vector<Eigen::Index> cluster;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lf.size(); ++i) {
    if (std::abs(lf(i) - center) <= tol) {
      cluster.push_back(i);
    } else {
      gap = std::min(gap, std::abs(lf(i) - center));
    }
  }
  EigenvectorReport r;
  r.k = k;
  r.cluster_size = static_cast<Eigen::Index>(cluster.size());
  r.fine_eigenvalue = center;
  r.disc_radius = 0.5 * gap;

  std::vector<Eigen::Index> coarse_in;
  for (Eigen::Index j = 0; j < lc.size(); ++j) {
    if (std::abs(lc(j) - center) < r.disc_radius) coarse_in.push_back(j);
  }
  if (coarse_in.size() != cluster.size()) {
    fail(ErrorKind::DegenerateCluster, "disc around fine eigenvalue " + std::to_string(k) + " captures " +
                                           std::to_string(coarse_in.size()) + " coarse eigenvalues for a cluster of " +
                                           std::to_string(cluster.size()));
  }

  // Energy-norm coordinates on the fine side: ||u||_E~^2 = sum (1 + lambda~_i) a_i^2.
  const Eigen::VectorXd w = (lf.array() + 1.0).max(0.0).sqrt().matrix();
  Eigen::MatrixXd a(lf.size(), static_cast<Eigen::Index>(coarse_in.size()));
  for (std::size_t c = 0; c < coarse_in.size(); ++c) {
    a.col(static_cast<Eigen::Index>(c)) = w.cwiseProduct(sp.coupling.col(coarse_in[c]));
  }
  const Eigen::MatrixXd h = a.transpose() * a;
  for (Eigen::Index idx : cluster) {
    const double b_sq = w(idx) * w(idx);
    const Eigen::VectorXd g = a.row(idx).transpose() * w(idx);
    r.energy_error = std::max(r.energy_error, unit_constrained_residual(h, g, b_sq));
  }
  r.fitted_constant = cert.delta_total > 0.0 ? r.energy_error / cert.delta_total : 0.0;
  return r;
}

}  // namespace que
