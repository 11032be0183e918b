#pragma once

// Self-similar models (unit interval, Sierpinski gasket) and their level-m
// approximation graphs. All combinatorics run in exact rational arithmetic.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace que {

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r) noexcept;

enum class ModelKind { Interval, Gasket };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model(std::string_view name);

struct FractalModel {
  ModelKind kind = ModelKind::Interval;
  std::string name;
  int num_contractions = 0;
  int boundary_size = 0;
  Rational conductance_base;
  Rational measure_cell_factor;
  Rational boundary_weight_factor;
  Rational interior_weight_factor;
  int max_level = 0;

  static FractalModel interval();
  static FractalModel gasket();
  static FractalModel of(ModelKind kind);

  Rational conductance(int level) const;
  Rational vertex_weight(int level, bool on_boundary) const;

  /// Theoretical quasi-unitary defect of level m against the limit form:
  /// (1+sqrt 2) 2^-m on the interval, (1+sqrt 3) sqrt(2/3) 5^-m/2 on the gasket.
  double theoretical_delta(int level) const;

  /// Base b in which theoretical_delta decays like b^-m (interval 2, gasket sqrt 5).
  double rate_base() const;
};

/// A vertex position in exact arithmetic. Interval: coords[0] = t in [0,1].
/// Gasket: barycentric pair (lambda2, lambda3) with x = p1 + lambda2 (p2-p1) + lambda3 (p3-p1).
struct ExactPoint {
  std::array<Rational, 2> coords{};

  friend bool operator==(const ExactPoint& a, const ExactPoint& b) {
    return a.coords == b.coords;
  }
  friend bool operator<(const ExactPoint& a, const ExactPoint& b) {
    if (a.coords[0] != b.coords[0]) return a.coords[0] < b.coords[0];
    return a.coords[1] < b.coords[1];
  }

  /// Planar embedding for plotting (p1=(0,0), p2=(1,0), p3=(1/2, sqrt3/2)).
  std::array<double, 2> embed(ModelKind kind) const;
};

ExactPoint midpoint(const ExactPoint& a, const ExactPoint& b);

/// Boundary vertices V_0 of a model in contraction order (p_j is the fixed point of F_j).
std::vector<ExactPoint> boundary_points(const FractalModel& model);

/// Word w = w_1 ... w_m over {1, ..., num_contractions}; empty word is K itself.
struct Word {
  std::vector<int> letters;

  std::size_t length() const noexcept { return letters.size(); }
  std::string str() const;
  friend bool operator==(const Word&, const Word&) = default;
};

/// Applies the contraction F_j (1-based) to a point.
ExactPoint contract(const FractalModel& model, int letter, const ExactPoint& p);

/// Corners of the m-cell F_w(K): two endpoints on the interval, three corners on the gasket.
/// Throws Validation when a letter is outside the alphabet.
std::vector<ExactPoint> cell_of(const FractalModel& model, const Word& word);

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  Rational conductance;
};

struct LevelCell {
  Word word;
  std::vector<std::size_t> vertices;  // in corner order of cell_of
};

struct LevelGraph {
  FractalModel model;
  int level = 0;
  std::vector<ExactPoint> vertices;  // canonical (lexicographic) order
  std::vector<bool> boundary;        // V_0 membership
  std::vector<Edge> edges;           // sorted by (i, j)
  std::vector<Rational> measure;     // mu_m(x)
  std::vector<LevelCell> cells;      // words in lexicographic order

  std::size_t size() const noexcept { return vertices.size(); }

  /// Exact lookup of a vertex by coordinate.
  std::optional<std::size_t> find(const ExactPoint& p) const;
  std::size_t index_of(const ExactPoint& p) const;
};

/// Builds V_m, E_m, conductances and weights. Throws ResourceLimit when level > max_level.
LevelGraph build_level(const FractalModel& model, int level);
LevelGraph build_level(const FractalModel& model, int level, int max_level);

std::size_t vertex_count(const FractalModel& model, int level);
std::size_t edge_count(const FractalModel& model, int level);

/// For each vertex of `coarse`, its index in `fine` (requires V_coarse subset of V_fine).
std::vector<std::size_t> embed_indices(const LevelGraph& coarse, const LevelGraph& fine);

}  // namespace que
