#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kidecomp/experiment.hpp"
#include "kidecomp/linalg.hpp"

namespace kid {

struct PropertyResult {
  std::string name;   // "<suite>/<property>"
  double worst = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifySizes {
  int planted = 100;
  int condexp = 50;
  int pairs = 50;
  int invariance = 25;
};

struct VerifyConfig {
  std::uint64_t seed = 0;
  Tolerance tol;
  VerifySizes sizes;
  std::string suite;       // empty = all; otherwise prefix on the suite name
  bool inject_bug = false; // self-test: corrupts the conditional expectation
};

std::vector<PropertyResult> run_verify_suite(const VerifyConfig& config);

bool all_pass(const std::vector<PropertyResult>& results);

// Curated analytic fixtures.
StatisticalExperiment fixture_identical_states();
StatisticalExperiment fixture_commuting_pair();
StatisticalExperiment fixture_pure_pair();

// Seeded random planted instance with dimension bounded by max_dim,
// 1-4 blocks and 2-4 labels; used by the ensembles and by tests.
PlantedInstance sample_planted_instance(std::uint64_t seed, int max_dim,
                                        const Tolerance& tol = {});

}  // namespace kid
