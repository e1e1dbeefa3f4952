#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kidecomp/linalg.hpp"

namespace kid {

// A finite labelled family of density matrices on a common space, with
// optional strictly positive label weights (uniform when absent).
struct StatisticalExperiment {
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<Matrix> states;  // aligned with labels
  std::optional<std::vector<double>> weights;

  int num_labels() const { return static_cast<int>(labels.size()); }
  std::vector<double> effective_weights() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Ground truth emitted by the planted-instance generator: the block data the
// decomposition pipeline is expected to recover.
struct PlantedGroundTruth {
  std::vector<std::pair<int, int>> block_dims;  // (n_i, m_i)
  Matrix planted_unitary;
  std::vector<Matrix> planted_sigmas;                 // m_i x m_i, faithful
  std::vector<std::vector<double>> planted_q;         // [label][block]
  std::vector<std::vector<Matrix>> planted_rho;       // [label][block], n_i x n_i
};

ValidationReport validate(const StatisticalExperiment& e, const Tolerance& tol = {});

Matrix average_state(const StatisticalExperiment& e,
                     const std::vector<double>& weights);
Matrix average_state(const StatisticalExperiment& e);

struct RestrictedExperiment {
  StatisticalExperiment experiment;
  Matrix isometry;  // d x d' columns spanning the joint support
};

// Compress onto the joint support of the family; the result is faithful.
RestrictedExperiment restrict_to_joint_support(const StatisticalExperiment& e,
                                               const Tolerance& tol = {});

struct PlantedInstance {
  StatisticalExperiment experiment;
  PlantedGroundTruth truth;
};

// Samples a random experiment with the given block structure; rejection
// sampling keeps the planted decomposition maximal (blocks cannot merge and
// no block splits further).
PlantedInstance gen_planted(const std::vector<std::pair<int, int>>& block_dims,
                            int num_labels, std::uint64_t seed,
                            const Tolerance& tol = {});

}  // namespace kid
