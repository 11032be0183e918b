#pragma once

// Identification operators between a coarse level m and a fine level M > m. The fine
// level stands in for L^2(K, mu) and for the form domain of the limit energy.
//
//   embed        coarse -> fine   iterated harmonic prolongation; its columns are the splines psi_{x,m}
//   project      fine -> coarse   weighted adjoint M_m^{-1} embed^T M_M
//   embed_energy coarse -> fine   on form domains; the same matrix as embed
//   sample       fine -> coarse   evaluation at V_m, a subset of V_M

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "que/forms.hpp"

namespace que {

struct IdentificationPair {
  FractalModel model;
  int coarse_level = 0;
  int fine_level = 0;
  std::shared_ptr<const LevelGraph> coarse_graph;
  std::shared_ptr<const LevelGraph> fine_graph;
  FormPencil coarse;
  FormPencil fine;
  Eigen::MatrixXd embed;                   // n_M x n_m
  Eigen::MatrixXd project;                 // n_m x n_M
  std::vector<Eigen::Index> sample_index;  // row x of the sampling map reads fine entry sample_index[x]

  const Eigen::MatrixXd& embed_energy() const noexcept { return embed; }

  Eigen::Index coarse_size() const noexcept { return coarse.size(); }
  Eigen::Index fine_size() const noexcept { return fine.size(); }

  Eigen::VectorXd sample(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd sampling_matrix() const;
};

/// Throws Domain unless 0 <= m < M, ResourceLimit when M exceeds the model cap.
IdentificationPair build_identification(const FractalModel& model, int coarse_level, int fine_level);

/// Degenerate pair with both sides at level m and every map the identity.
IdentificationPair identity_pair(const FractalModel& model, int level);

/// Composition of pairs (m -> k) and (k -> M): embed = embed_bc embed_ab,
/// project = project_ab project_bc, sampling composes. Throws Domain on mismatch.
IdentificationPair compose_pairs(const IdentificationPair& ab, const IdentificationPair& bc);

/// Column psi_{x,m} of the embedding. Throws Domain when x is not a coarse vertex.
Eigen::VectorXd column_spline(const IdentificationPair& pair, std::size_t coarse_index);
Eigen::VectorXd column_spline(const IdentificationPair& pair, const ExactPoint& x);

/// Default fine level for a coarse level: m+5 (interval), m+3 (gasket), capped at the model maximum.
int default_fine_level(const FractalModel& model, int coarse_level);

}  // namespace que
