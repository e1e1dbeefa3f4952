#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kidecomp/linalg.hpp"

namespace kid {

// All randomness in the toolkit flows through a seeded 64-bit generator so
// every run is reproducible from (input, seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen_);
  }
  double normal() { return normal_(gen_); }
  Complex cnormal() { return Complex(normal(), normal()); }

  Matrix ginibre(int rows, int cols);
  // G G† / trace for a Ginibre G: a generically faithful density matrix.
  Matrix ginibre_density(int d);
  // QR of a Ginibre matrix with the R-diagonal phases absorbed into Q.
  Matrix haar_unitary(int d);
  Matrix hermitian(int d);
  // Hermitian Ginibre probe normalized to unit Frobenius norm.
  Matrix hermitian_probe(int d);
  // Strictly positive probability vector (entries bounded away from zero).
  std::vector<double> prob_vector(int k, double floor = 0.05);

  // Deterministic stream splitting (splitmix64 mix of master and index).
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index);

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace kid
