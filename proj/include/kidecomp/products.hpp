#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kidecomp/experiment.hpp"
#include "kidecomp/structure.hpp"

namespace kid {

struct ProductMsCheck {
  bool left = false;
  bool right = false;
  bool product = false;
  bool consistent() const { return product == (left && right); }
};

struct ProductReport {
  std::vector<std::pair<int, int>> left_dims;
  std::vector<std::pair<int, int>> right_dims;
  std::vector<std::pair<int, int>> product_dims;
  bool matched = false;
  double q_factorization_residual = 0.0;
  ProductMsCheck minimal_sufficiency_checks;
};

// Labels become pairs "(theta,xi)", states Kronecker products, weights
// products (kept only when a factor carries explicit weights).
StatisticalExperiment tensor_experiments(const StatisticalExperiment& e,
                                         const StatisticalExperiment& f);

// Minimal sufficiency of both factors and of the product.
ProductMsCheck check_product_minimal_sufficiency(const StatisticalExperiment& e,
                                                 const StatisticalExperiment& f,
                                                 const Tolerance& tol, std::uint64_t seed);

// Decomposes both factors and the product, matches product blocks to index
// pairs by weight-vector agreement, and reports the worst factorization
// residual. Throws MatchingFailed when no bijection lands within q_tol.
ProductReport check_product_classical(const StatisticalExperiment& e,
                                      const StatisticalExperiment& f, const Tolerance& tol,
                                      std::uint64_t seed, double q_tol = 1e-6);

}  // namespace kid
