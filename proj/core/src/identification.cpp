#include "que/identification.hpp"

#include <algorithm>
#include <string>

#include "que/errors.hpp"

namespace que {

Eigen::VectorXd IdentificationPair::sample(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(sample_index.size()));
  for (std::size_t x = 0; x < sample_index.size(); ++x) out(static_cast<Eigen::Index>(x)) = u(sample_index[x]);
  return out;
}

Eigen::MatrixXd IdentificationPair::sampling_matrix() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(coarse_size(), fine_size());
  for (std::size_t x = 0; x < sample_index.size(); ++x) s(static_cast<Eigen::Index>(x), sample_index[x]) = 1.0;
  return s;
}

IdentificationPair build_identification(const FractalModel& model, int coarse_level, int fine_level) {
  if (coarse_level < 0 || coarse_level >= fine_level) {
    fail(ErrorKind::Domain, "identification needs 0 <= m < M (got m=" + std::to_string(coarse_level) +
                                ", M=" + std::to_string(fine_level) + ")");
  }
  // Builds the fine level first so the level cap is reported before any work.
  auto fine_graph = std::make_shared<const LevelGraph>(build_level(model, fine_level));

  IdentificationPair pair;
  pair.model = model;
  pair.coarse_level = coarse_level;
  pair.fine_level = fine_level;
  pair.fine_graph = fine_graph;
  pair.fine = assemble(*fine_graph);

  auto current = std::make_shared<const LevelGraph>(build_level(model, coarse_level));
  pair.coarse_graph = current;
  pair.coarse = assemble(*current);

  Eigen::MatrixXd embed = Eigen::MatrixXd::Identity(pair.coarse.size(), pair.coarse.size());
  for (int level = coarse_level; level < fine_level; ++level) {
    auto next = level + 1 == fine_level ? fine_graph
                                        : std::make_shared<const LevelGraph>(build_level(model, level + 1));
    embed = prolongation(*current, *next) * embed;
    current = next;
  }
  pair.embed = std::move(embed);

  pair.project = pair.coarse.mass.cwiseInverse().asDiagonal() * pair.embed.transpose() *
                 pair.fine.mass.asDiagonal();

  const auto idx = embed_indices(*pair.coarse_graph, *fine_graph);
  pair.sample_index.assign(idx.begin(), idx.end());
  return pair;
}

IdentificationPair identity_pair(const FractalModel& model, int level) {
  auto graph = std::make_shared<const LevelGraph>(build_level(model, level));
  IdentificationPair pair;
  pair.model = model;
  pair.coarse_level = level;
  pair.fine_level = level;
  pair.coarse_graph = graph;
  pair.fine_graph = graph;
  pair.coarse = assemble(*graph);
  pair.fine = pair.coarse;
  const Eigen::Index n = pair.coarse.size();
  pair.embed = Eigen::MatrixXd::Identity(n, n);
  pair.project = Eigen::MatrixXd::Identity(n, n);
  pair.sample_index.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pair.sample_index[static_cast<std::size_t>(i)] = i;
  return pair;
}

IdentificationPair compose_pairs(const IdentificationPair& ab, const IdentificationPair& bc) {
  if (ab.model.kind != bc.model.kind || ab.fine_level != bc.coarse_level ||
      ab.fine_size() != bc.coarse_size()) {
    fail(ErrorKind::Domain, "cannot compose: fine space of the first pair is not the coarse space of the second");
  }
  IdentificationPair out;
  out.model = ab.model;
  out.coarse_level = ab.coarse_level;
  out.fine_level = bc.fine_level;
  out.coarse_graph = ab.coarse_graph;
  out.fine_graph = bc.fine_graph;
  out.coarse = ab.coarse;
  out.fine = bc.fine;
  out.embed = bc.embed * ab.embed;
  out.project = ab.project * bc.project;
  out.sample_index.resize(ab.sample_index.size());
  for (std::size_t x = 0; x < ab.sample_index.size(); ++x) {
    out.sample_index[x] = bc.sample_index[static_cast<std::size_t>(ab.sample_index[x])];
  }
  return out;
}

Eigen::VectorXd column_spline(const IdentificationPair& pair, std::size_t coarse_index) {
  if (coarse_index >= static_cast<std::size_t>(pair.coarse_size())) {
    fail(ErrorKind::Domain, "vertex " + std::to_string(coarse_index) + " is not a coarse vertex");
  }
  return pair.embed.col(static_cast<Eigen::Index>(coarse_index));
}

Eigen::VectorXd column_spline(const IdentificationPair& pair, const ExactPoint& x) {
  auto idx = pair.coarse_graph->find(x);
  if (!idx) fail(ErrorKind::Domain, "point is not a vertex of the coarse level");
  return column_spline(pair, *idx);
}

int default_fine_level(const FractalModel& model, int coarse_level) {
  const int offset = model.kind == ModelKind::Interval ? 5 : 3;
  return std::min(coarse_level + offset, model.max_level);
}

}  // namespace que
