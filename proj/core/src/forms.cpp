#include "que/forms.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SparseCholesky>

#include "que/errors.hpp"

namespace que {

namespace {

std::vector<std::size_t> complement_indices(Eigen::Index n, std::span<const std::size_t> kept) {
  std::vector<bool> is_kept(static_cast<std::size_t>(n), false);
  for (auto k : kept) is_kept[k] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < is_kept.size(); ++i) {
    if (!is_kept[i]) rest.push_back(i);
  }
  return rest;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          a(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  return out;
}

void check_consecutive(const LevelGraph& coarse, const LevelGraph& fine) {
  if (coarse.model.kind != fine.model.kind || fine.level != coarse.level + 1) {
    fail(ErrorKind::Domain, "prolongation needs consecutive levels of the same model");
  }
}

// Grounded solve: values on `fixed` are prescribed, the remaining entries minimise u^T L u.
Eigen::VectorXd minimise_energy(const Eigen::SparseMatrix<double>& stiffness,
                                std::span<const std::size_t> fixed, const Eigen::VectorXd& fixed_values) {
  const Eigen::Index n = stiffness.rows();
  std::vector<Eigen::Index> free_pos(static_cast<std::size_t>(n), -1);
  std::vector<bool> is_fixed(static_cast<std::size_t>(n), false);
  for (auto k : fixed) is_fixed[k] = true;
  Eigen::Index n_free = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_fixed[static_cast<std::size_t>(i)]) free_pos[static_cast<std::size_t>(i)] = n_free++;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < fixed.size(); ++k) u(static_cast<Eigen::Index>(fixed[k])) = fixed_values(static_cast<Eigen::Index>(k));
  if (n_free == 0) return u;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (Eigen::Index col = 0; col < stiffness.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, col); it; ++it) {
      const auto r = free_pos[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      const auto c = free_pos[static_cast<std::size_t>(it.col())];
      if (c >= 0) {
        trip.emplace_back(r, c, it.value());
      } else {
        rhs(r) -= it.value() * u(it.col());
      }
    }
  }
  Eigen::SparseMatrix<double> interior(n_free, n_free);
  interior.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(interior);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::Numerical, "singular interior block");
  const Eigen::VectorXd sol = ldlt.solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto p = free_pos[static_cast<std::size_t>(i)];
    if (p >= 0) u(i) = sol(p);
  }
  return u;
}

}  // namespace

double FormPencil::energy(const Eigen::VectorXd& f) const { return f.dot(stiffness * f); }

double FormPencil::energy(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return f.dot(stiffness * g);
}

double FormPencil::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return f.cwiseProduct(mass).dot(g);
}

double FormPencil::norm(const Eigen::VectorXd& f) const { return std::sqrt(inner(f, f)); }

double FormPencil::energy_norm(const Eigen::VectorXd& f) const {
  return std::sqrt(inner(f, f) + energy(f));
}

std::vector<Rational> ExactStiffness::row_sums() const {
  std::vector<Rational> sums = diagonal;
  for (const auto& e : off_diagonal) {
    sums[e.i] -= e.conductance;
    sums[e.j] -= e.conductance;
  }
  return sums;
}

ExactStiffness assemble_exact(const LevelGraph& graph) {
  ExactStiffness s;
  s.diagonal.assign(graph.size(), Rational(0));
  s.off_diagonal = graph.edges;
  for (const auto& e : graph.edges) {
    s.diagonal[e.i] += e.conductance;
    s.diagonal[e.j] += e.conductance;
  }
  return s;
}

FormPencil assemble(const LevelGraph& graph) {
  const ExactStiffness exact = assemble_exact(graph);
  const auto n = static_cast<Eigen::Index>(graph.size());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(graph.size() + 2 * exact.off_diagonal.size());
  for (std::size_t i = 0; i < exact.diagonal.size(); ++i) {
    trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), to_double(exact.diagonal[i]));
  }
  for (const auto& e : exact.off_diagonal) {
    const double c = to_double(e.conductance);
    trip.emplace_back(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j), -c);
    trip.emplace_back(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i), -c);
  }

  FormPencil p;
  p.model = graph.model.kind;
  p.level = graph.level;
  p.stiffness.resize(n, n);
  p.stiffness.setFromTriplets(trip.begin(), trip.end());
  p.mass.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.mass(i) = to_double(graph.measure[static_cast<std::size_t>(i)]);
  return p;
}

Eigen::SparseMatrix<double> prolongation(const LevelGraph& coarse, const LevelGraph& fine) {
  check_consecutive(coarse, fine);
  const auto into_fine = embed_indices(coarse, fine);

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t x = 0; x < coarse.size(); ++x) {
    trip.emplace_back(static_cast<Eigen::Index>(into_fine[x]), static_cast<Eigen::Index>(x), 1.0);
  }
  const bool gasket = coarse.model.kind == ModelKind::Gasket;
  for (const auto& cell : coarse.cells) {
    const auto& v = cell.vertices;
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) {
        const auto row = static_cast<Eigen::Index>(
            fine.index_of(midpoint(coarse.vertices[v[a]], coarse.vertices[v[b]])));
        if (!gasket) {
          trip.emplace_back(row, static_cast<Eigen::Index>(v[a]), 0.5);
          trip.emplace_back(row, static_cast<Eigen::Index>(v[b]), 0.5);
          continue;
        }
        const std::size_t opposite = v[3 - a - b];
        trip.emplace_back(row, static_cast<Eigen::Index>(v[a]), 0.4);
        trip.emplace_back(row, static_cast<Eigen::Index>(v[b]), 0.4);
        trip.emplace_back(row, static_cast<Eigen::Index>(opposite), 0.2);
      }
    }
  }
  Eigen::SparseMatrix<double> p(static_cast<Eigen::Index>(fine.size()), static_cast<Eigen::Index>(coarse.size()));
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

Eigen::VectorXd harmonic_extension(const LevelGraph& coarse, const LevelGraph& fine,
                                   const Eigen::VectorXd& f) {
  if (f.size() != static_cast<Eigen::Index>(coarse.size())) {
    fail(ErrorKind::Domain, "function must be defined on all of V_m");
  }
  return prolongation(coarse, fine) * f;
}

Eigen::VectorXd harmonic_extension(const FractalModel& model, int level, const Eigen::VectorXd& f) {
  const LevelGraph coarse = build_level(model, level);
  const LevelGraph fine = build_level(model, level + 1);
  return harmonic_extension(coarse, fine, f);
}

Eigen::VectorXd harmonic_extension_by_solve(const LevelGraph& coarse, const LevelGraph& fine,
                                            const FormPencil& fine_pencil, const Eigen::VectorXd& f) {
  check_consecutive(coarse, fine);
  if (f.size() != static_cast<Eigen::Index>(coarse.size())) {
    fail(ErrorKind::Domain, "function must be defined on all of V_m");
  }
  const auto fixed = embed_indices(coarse, fine);
  return minimise_energy(fine_pencil.stiffness, fixed, f);
}

Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& matrix, std::span<const std::size_t> kept) {
  const auto rest = complement_indices(matrix.rows(), kept);
  const Eigen::MatrixXd a_kk = submatrix(matrix, kept, kept);
  if (rest.empty()) return a_kk;
  const Eigen::MatrixXd a_kr = submatrix(matrix, kept, rest);
  const Eigen::MatrixXd a_rr = submatrix(matrix, rest, rest);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a_rr);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    fail(ErrorKind::Numerical, "singular interior block in Schur complement");
  }
  return a_kk - a_kr * ldlt.solve(a_kr.transpose());
}

double schur_compatibility_residual(const FractalModel& model, int level) {
  const LevelGraph coarse = build_level(model, level);
  const LevelGraph fine = build_level(model, level + 1);
  const Eigen::MatrixXd l_coarse = assemble(coarse).dense_stiffness();
  const Eigen::MatrixXd l_fine = assemble(fine).dense_stiffness();
  const auto kept = embed_indices(coarse, fine);
  const Eigen::MatrixXd s = schur_complement(l_fine, kept);
  return (s - l_coarse).norm() / l_coarse.norm();
}

double resistance(const FormPencil& pencil, std::size_t x, std::size_t y) {
  const auto n = static_cast<std::size_t>(pencil.size());
  if (x == y) fail(ErrorKind::Domain, "resistance needs two distinct vertices");
  if (x >= n || y >= n) fail(ErrorKind::Domain, "vertex index out of range");
  const std::size_t fixed[] = {x, y};
  const Eigen::Vector2d values(1.0, 0.0);
  const Eigen::VectorXd u = minimise_energy(pencil.stiffness, fixed, values);
  return 1.0 / pencil.energy(u);
}

HoelderCheck hoelder_check(const FormPencil& pencil, const Eigen::VectorXd& u, std::size_t x,
                           std::size_t y) {
  HoelderCheck h;
  const double diff = u(static_cast<Eigen::Index>(x)) - u(static_cast<Eigen::Index>(y));
  h.lhs = diff * diff;
  h.rhs = pencil.energy(u) * resistance(pencil, x, y);
  h.ok = h.lhs <= h.rhs * (1.0 + 1e-10);
  return h;
}

}  // namespace que
