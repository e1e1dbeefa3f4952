#include "kidecomp/products.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "kidecomp/rng.hpp"

namespace kid {

StatisticalExperiment tensor_experiments(const StatisticalExperiment& e,
                                         const StatisticalExperiment& f) {
  require(validate(e).ok() && validate(f).ok(), ErrorKind::InvalidInput,
          "both factors must be valid experiments");
  StatisticalExperiment out;
  out.dim = e.dim * f.dim;
  const bool weighted = e.weights.has_value() || f.weights.has_value();
  std::vector<double> we = e.effective_weights();
  std::vector<double> wf = f.effective_weights();
  std::vector<double> w;
  for (int s = 0; s < e.num_labels(); ++s) {
    for (int t = 0; t < f.num_labels(); ++t) {
      out.labels.push_back("(" + e.labels[s] + "," + f.labels[t] + ")");
      out.states.push_back(kron(e.states[s], f.states[t]));
      if (weighted) w.push_back(we[s] * wf[t]);
    }
  }
  if (weighted) out.weights = std::move(w);
  return out;
}

ProductMsCheck check_product_minimal_sufficiency(const StatisticalExperiment& e,
                                                 const StatisticalExperiment& f,
                                                 const Tolerance& tol, std::uint64_t seed) {
  (void)seed;
  require(e.dim * f.dim <= 64, ErrorKind::InvalidInput, "product dimension exceeds 64");
  ProductMsCheck check;
  check.left = is_minimal_sufficient(e, tol);
  check.right = is_minimal_sufficient(f, tol);
  check.product = is_minimal_sufficient(tensor_experiments(e, f), tol);
  return check;
}

namespace {

double pair_cost(const Block& prod, const Block& left, const Block& right,
                 int nlabels_left, int nlabels_right) {
  if (prod.n != left.n * right.n || prod.m != left.m * right.m)
    return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int s = 0; s < nlabels_left; ++s)
    for (int t = 0; t < nlabels_right; ++t) {
      const int idx = s * nlabels_right + t;
      worst = std::max(worst, std::abs(prod.q[idx] - left.q[s] * right.q[t]));
    }
  return worst;
}

}  // namespace

ProductReport check_product_classical(const StatisticalExperiment& e,
                                      const StatisticalExperiment& f, const Tolerance& tol,
                                      std::uint64_t seed, double q_tol) {
  require(e.dim * f.dim <= 64, ErrorKind::InvalidInput, "product dimension exceeds 64");
  KIDecomposition ke = ki_decomposition(e, tol, Rng::derive(seed, 101));
  KIDecomposition kf = ki_decomposition(f, tol, Rng::derive(seed, 102));
  StatisticalExperiment ef = tensor_experiments(e, f);
  KIDecomposition kp = ki_decomposition(ef, tol, Rng::derive(seed, 103));

  ProductReport rep;
  rep.left_dims = ke.block_dims();
  rep.right_dims = kf.block_dims();
  rep.product_dims = kp.block_dims();
  rep.minimal_sufficiency_checks.left =
      ke.support_dim() == e.dim && ke.blocks.size() == 1 && ke.blocks[0].m == 1;
  rep.minimal_sufficiency_checks.right =
      kf.support_dim() == f.dim && kf.blocks.size() == 1 && kf.blocks[0].m == 1;
  rep.minimal_sufficiency_checks.product =
      kp.support_dim() == ef.dim && kp.blocks.size() == 1 && kp.blocks[0].m == 1;

  const int nb = static_cast<int>(kp.blocks.size());
  const int npairs = static_cast<int>(ke.blocks.size() * kf.blocks.size());
  if (nb != npairs)
    fail(ErrorKind::MatchingFailed,
         "product has " + std::to_string(nb) + " blocks, factors give " +
             std::to_string(npairs) + " index pairs");

  // Cost of assigning product block b to the pair (i, j).
  const int nl = e.num_labels(), nr = f.num_labels();
  std::vector<std::vector<double>> cost(nb, std::vector<double>(nb));
  for (int b = 0; b < nb; ++b)
    for (int i = 0; i < static_cast<int>(ke.blocks.size()); ++i)
      for (int j = 0; j < static_cast<int>(kf.blocks.size()); ++j)
        cost[b][i * kf.blocks.size() + j] =
            pair_cost(kp.blocks[b], ke.blocks[i], kf.blocks[j], nl, nr);

  // Greedy assignment on ascending cost, verified against q_tol; exhaustive
  // fallback for small block counts since the greedy choice is not optimal
  // in general.
  auto assignment_residual = [&](const std::vector<int>& perm) {
    double worst = 0.0;
    for (int b = 0; b < nb; ++b) worst = std::max(worst, cost[b][perm[b]]);
    return worst;
  };

  std::vector<int> best;
  {
    std::vector<std::tuple<double, int, int>> edges;
    for (int b = 0; b < nb; ++b)
      for (int p = 0; p < nb; ++p)
        if (std::isfinite(cost[b][p])) edges.emplace_back(cost[b][p], b, p);
    std::sort(edges.begin(), edges.end());
    std::vector<int> perm(nb, -1);
    std::vector<bool> used(nb, false);
    int placed = 0;
    for (const auto& [c, b, p] : edges) {
      if (perm[b] != -1 || used[p]) continue;
      perm[b] = p;
      used[p] = true;
      ++placed;
    }
    if (placed == nb && assignment_residual(perm) <= q_tol) best = perm;
  }
  if (best.empty() && nb <= 8) {
    std::vector<int> perm(nb);
    std::iota(perm.begin(), perm.end(), 0);
    double best_worst = std::numeric_limits<double>::infinity();
    do {
      const double worst = assignment_residual(perm);
      if (worst < best_worst) {
        best_worst = worst;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_worst > q_tol) best.clear();
  }
  if (best.empty())
    fail(ErrorKind::MatchingFailed,
         "no block matching reaches the factorization tolerance " + std::to_string(q_tol));

  rep.q_factorization_residual = assignment_residual(best);
  rep.matched = true;
  return rep;
}

}  // namespace kid
