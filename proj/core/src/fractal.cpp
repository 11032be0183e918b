#include "que/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "que/errors.hpp"

namespace que {

namespace {

Rational rational_pow(const Rational& base, int exponent) {
  Rational result(1);
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

std::int64_t int_pow(std::int64_t base, int exponent) {
  std::int64_t result = 1;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

}  // namespace

double to_double(const Rational& r) noexcept {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::Interval ? "interval" : "gasket";
}

ModelKind parse_model(std::string_view name) {
  if (name == "interval") return ModelKind::Interval;
  if (name == "gasket") return ModelKind::Gasket;
  fail(ErrorKind::Validation, "unknown model '" + std::string(name) + "' (expected interval|gasket)");
}

FractalModel FractalModel::interval() {
  FractalModel m;
  m.kind = ModelKind::Interval;
  m.name = "interval";
  m.num_contractions = 2;
  m.boundary_size = 2;
  m.conductance_base = Rational(2);
  m.measure_cell_factor = Rational(1, 2);
  m.boundary_weight_factor = Rational(1, 2);
  m.interior_weight_factor = Rational(1);
  m.max_level = 8;
  return m;
}

FractalModel FractalModel::gasket() {
  FractalModel m;
  m.kind = ModelKind::Gasket;
  m.name = "gasket";
  m.num_contractions = 3;
  m.boundary_size = 3;
  m.conductance_base = Rational(5, 3);
  m.measure_cell_factor = Rational(1, 3);
  m.boundary_weight_factor = Rational(1, 3);
  m.interior_weight_factor = Rational(2, 3);
  m.max_level = 7;
  return m;
}

FractalModel FractalModel::of(ModelKind kind) {
  return kind == ModelKind::Interval ? interval() : gasket();
}

Rational FractalModel::conductance(int level) const { return rational_pow(conductance_base, level); }

Rational FractalModel::vertex_weight(int level, bool on_boundary) const {
  return rational_pow(measure_cell_factor, level) *
         (on_boundary ? boundary_weight_factor : interior_weight_factor);
}

double FractalModel::theoretical_delta(int level) const {
  if (kind == ModelKind::Interval) return (1.0 + std::sqrt(2.0)) * std::pow(2.0, -level);
  return (1.0 + std::sqrt(3.0)) * std::sqrt(2.0) / std::sqrt(3.0) * std::pow(5.0, -0.5 * level);
}

double FractalModel::rate_base() const {
  return kind == ModelKind::Interval ? 2.0 : std::sqrt(5.0);
}

std::array<double, 2> ExactPoint::embed(ModelKind kind) const {
  if (kind == ModelKind::Interval) return {to_double(coords[0]), 0.0};
  const double l2 = to_double(coords[0]);
  const double l3 = to_double(coords[1]);
  return {l2 + 0.5 * l3, 0.5 * std::sqrt(3.0) * l3};
}

ExactPoint midpoint(const ExactPoint& a, const ExactPoint& b) {
  const Rational half(1, 2);
  return ExactPoint{{(a.coords[0] + b.coords[0]) * half, (a.coords[1] + b.coords[1]) * half}};
}

std::vector<ExactPoint> boundary_points(const FractalModel& model) {
  const Rational zero(0);
  const Rational one(1);
  if (model.kind == ModelKind::Interval) return {ExactPoint{{zero, zero}}, ExactPoint{{one, zero}}};
  return {ExactPoint{{zero, zero}}, ExactPoint{{one, zero}}, ExactPoint{{zero, one}}};
}

std::string Word::str() const {
  std::string s;
  for (int letter : letters) s += std::to_string(letter);
  return s;
}

ExactPoint contract(const FractalModel& model, int letter, const ExactPoint& p) {
  if (letter < 1 || letter > model.num_contractions) {
    fail(ErrorKind::Validation, "letter " + std::to_string(letter) + " outside alphabet {1.." +
                                    std::to_string(model.num_contractions) + "}");
  }
  // Each F_j is the homothety with ratio 1/2 about its fixed point p_j.
  const ExactPoint fixed = boundary_points(model)[static_cast<std::size_t>(letter - 1)];
  return midpoint(p, fixed);
}

std::vector<ExactPoint> cell_of(const FractalModel& model, const Word& word) {
  std::vector<ExactPoint> corners = boundary_points(model);
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    for (auto& c : corners) c = contract(model, *it, c);
  }
  return corners;
}

std::optional<std::size_t> LevelGraph::find(const ExactPoint& p) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
  if (it == vertices.end() || !(*it == p)) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t LevelGraph::index_of(const ExactPoint& p) const {
  auto idx = find(p);
  if (!idx) fail(ErrorKind::Domain, "point is not a vertex of level " + std::to_string(level));
  return *idx;
}

std::size_t vertex_count(const FractalModel& model, int level) {
  if (level < 0) fail(ErrorKind::Domain, "level must be non-negative");
  if (model.kind == ModelKind::Interval) return static_cast<std::size_t>(int_pow(2, level) + 1);
  return static_cast<std::size_t>((int_pow(3, level + 1) + 3) / 2);
}

std::size_t edge_count(const FractalModel& model, int level) {
  if (level < 0) fail(ErrorKind::Domain, "level must be non-negative");
  if (model.kind == ModelKind::Interval) return static_cast<std::size_t>(int_pow(2, level));
  return static_cast<std::size_t>(int_pow(3, level + 1));
}

LevelGraph build_level(const FractalModel& model, int level) {
  return build_level(model, level, model.max_level);
}

LevelGraph build_level(const FractalModel& model, int level, int max_level) {
  if (level < 0) fail(ErrorKind::Domain, "level must be non-negative");
  if (level > max_level) {
    fail(ErrorKind::ResourceLimit, "level " + std::to_string(level) + " exceeds the maximum level " +
                                       std::to_string(max_level) + " for model " + model.name);
  }

  LevelGraph g;
  g.model = model;
  g.level = level;

  // Enumerate W_m lexicographically.
  std::vector<Word> words{Word{}};
  for (int step = 0; step < level; ++step) {
    std::vector<Word> next;
    next.reserve(words.size() * static_cast<std::size_t>(model.num_contractions));
    for (const auto& w : words) {
      for (int letter = 1; letter <= model.num_contractions; ++letter) {
        Word ext = w;
        ext.letters.push_back(letter);
        next.push_back(std::move(ext));
      }
    }
    words = std::move(next);
  }

  std::vector<std::vector<ExactPoint>> corner_sets;
  corner_sets.reserve(words.size());
  std::map<ExactPoint, std::size_t> index;
  for (const auto& w : words) {
    corner_sets.push_back(cell_of(model, w));
    for (const auto& p : corner_sets.back()) index.emplace(p, 0);
  }
  g.vertices.reserve(index.size());
  for (auto& [p, idx] : index) {
    idx = g.vertices.size();
    g.vertices.push_back(p);
  }

  const auto v0 = boundary_points(model);
  g.boundary.assign(g.vertices.size(), false);
  for (const auto& p : v0) g.boundary[index.at(p)] = true;

  g.measure.resize(g.vertices.size());
  for (std::size_t i = 0; i < g.vertices.size(); ++i) g.measure[i] = model.vertex_weight(level, g.boundary[i]);

  const Rational c = model.conductance(level);
  g.cells.reserve(words.size());
  for (std::size_t k = 0; k < words.size(); ++k) {
    LevelCell cell{words[k], {}};
    for (const auto& p : corner_sets[k]) cell.vertices.push_back(index.at(p));
    for (std::size_t a = 0; a < cell.vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < cell.vertices.size(); ++b) {
        auto [i, j] = std::minmax(cell.vertices[a], cell.vertices[b]);
        g.edges.push_back(Edge{i, j, c});
      }
    }
    g.cells.push_back(std::move(cell));
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  // Every edge belongs to exactly one m-cell, so no duplicates are expected here.
  auto dup = std::adjacent_find(g.edges.begin(), g.edges.end(),
                                [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; });
  if (dup != g.edges.end()) fail(ErrorKind::Numerical, "edge shared by two cells");
  return g;
}

std::vector<std::size_t> embed_indices(const LevelGraph& coarse, const LevelGraph& fine) {
  std::vector<std::size_t> out;
  out.reserve(coarse.size());
  for (const auto& p : coarse.vertices) {
    auto idx = fine.find(p);
    if (!idx) fail(ErrorKind::Domain, "coarse vertex missing from the fine level");
    out.push_back(*idx);
  }
  return out;
}

}  // namespace que
