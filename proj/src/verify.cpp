#include "kidecomp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "kidecomp/classical.hpp"
#include "kidecomp/minimal_sufficiency.hpp"
#include "kidecomp/products.hpp"
#include "kidecomp/rng.hpp"
#include "kidecomp/structure.hpp"

namespace kid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double containment_residual(const OperatorSubspace& inner, const OperatorSubspace& outer) {
  double worst = 0.0;
  for (const Matrix& b : inner.basis) {
    Matrix recon = Matrix::Zero(inner.ambient_dim, inner.ambient_dim);
    for (const Matrix& o : outer.basis) recon += hs_inner(o, b) * o;
    worst = std::max(worst, (b - recon).norm());
  }
  return worst;
}

double mutual_containment_residual(const OperatorSubspace& a, const OperatorSubspace& b) {
  return std::max(containment_residual(a, b), containment_residual(b, a));
}

std::vector<std::pair<int, int>> sorted_dims(std::vector<std::pair<int, int>> dims) {
  std::sort(dims.begin(), dims.end());
  return dims;
}

// Greedy min-cost matching of computed blocks onto planted blocks with equal
// dims; returns the worst per-label weight deviation, or infinity when no
// bijection exists.
double planted_q_agreement(const KIDecomposition& k, const PlantedGroundTruth& truth) {
  const int nb = static_cast<int>(k.blocks.size());
  if (nb != static_cast<int>(truth.block_dims.size())) return kInf;
  const int nlabels = static_cast<int>(k.labels.size());
  std::vector<std::vector<double>> cost(nb, std::vector<double>(nb, kInf));
  for (int b = 0; b < nb; ++b)
    for (int j = 0; j < nb; ++j) {
      if (std::make_pair(k.blocks[b].n, k.blocks[b].m) != truth.block_dims[j]) continue;
      double worst = 0.0;
      for (int t = 0; t < nlabels; ++t)
        worst = std::max(worst, std::abs(k.blocks[b].q[t] - truth.planted_q[t][j]));
      cost[b][j] = worst;
    }
  std::vector<std::tuple<double, int, int>> edges;
  for (int b = 0; b < nb; ++b)
    for (int j = 0; j < nb; ++j)
      if (std::isfinite(cost[b][j])) edges.emplace_back(cost[b][j], b, j);
  std::sort(edges.begin(), edges.end());
  std::vector<int> pick(nb, -1);
  std::vector<bool> used(nb, false);
  int placed = 0;
  double worst = 0.0;
  for (const auto& [c, b, j] : edges) {
    if (pick[b] != -1 || used[j]) continue;
    pick[b] = j;
    used[j] = true;
    worst = std::max(worst, c);
    ++placed;
  }
  return placed == nb ? worst : kInf;
}

struct SuiteRecorder {
  std::vector<PropertyResult>& out;
  std::string suite;

  void add(const std::string& prop, double worst, double threshold, bool below = true,
           const std::string& detail = "") {
    const bool pass = below ? worst <= threshold : worst > threshold;
    out.push_back({suite + "/" + prop, worst, threshold, pass, detail});
  }
  void add_count(const std::string& prop, int violations, const std::string& detail = "") {
    out.push_back({suite + "/" + prop, static_cast<double>(violations), 0.0, violations == 0,
                   detail});
  }
};

bool suite_selected(const VerifyConfig& cfg, const std::string& suite) {
  return cfg.suite.empty() || suite.rfind(cfg.suite, 0) == 0;
}

Matrix perturb_expectation_choi(Matrix choi, int d) {
  // Negates the image of the first matrix unit; breaks idempotence loudly.
  choi.block(0, 0, d, d) *= -1.0;
  return choi;
}

StatisticalExperiment rotate_experiment(const StatisticalExperiment& e, const Matrix& u) {
  StatisticalExperiment out = e;
  for (Matrix& rho : out.states) {
    rho = u * rho * u.adjoint();
    rho = ((rho + rho.adjoint()) / 2.0).eval();
  }
  return out;
}

const std::vector<std::vector<std::pair<int, int>>>& pair_structure_menu() {
  static const std::vector<std::vector<std::pair<int, int>>> menu = {
      {{2, 1}},
      {{1, 2}},
      {{3, 1}},
      {{1, 3}},
      {{4, 1}},
      {{1, 4}},
      {{2, 2}},
      {{1, 1}, {1, 1}},
      {{1, 1}, {1, 2}},
      {{2, 1}, {1, 1}},
      {{2, 1}, {1, 2}},
      {{1, 1}, {1, 1}, {1, 1}},
  };
  return menu;
}

StatisticalExperiment sample_pair_factor(Rng& rng, std::uint64_t seed) {
  const auto& menu = pair_structure_menu();
  const auto& dims = menu[rng.uniform_int(0, menu.size() - 1)];
  const int labels = 2 + static_cast<int>(rng.uniform_int(0, 1));
  return gen_planted(dims, labels, seed).experiment;
}

void run_planted_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "planted"};
  const auto t0 = std::chrono::steady_clock::now();
  int recovery_violations = 0;
  double worst_resid = 0.0, worst_q = 0.0;
  std::string detail;
  for (int t = 0; t < cfg.sizes.planted; ++t) {
    const std::uint64_t s = Rng::derive(cfg.seed, 1000 + t);
    try {
      PlantedInstance inst = sample_planted_instance(s, 12, cfg.tol);
      KIDecomposition k = ki_decomposition(inst.experiment, cfg.tol, Rng::derive(s, 2));
      if (sorted_dims(k.block_dims()) != sorted_dims(inst.truth.block_dims)) {
        ++recovery_violations;
        detail = "instance " + std::to_string(t) + " recovered wrong block dims";
        continue;
      }
      for (double r : reconstruction_residuals(inst.experiment, k))
        worst_resid = std::max(worst_resid, r);
      worst_q = std::max(worst_q, planted_q_agreement(k, inst.truth));
    } catch (const Error& err) {
      ++recovery_violations;
      detail = "instance " + std::to_string(t) + ": " + err.what();
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.add_count("recovery", recovery_violations, detail);
  rec.add("reconstruction", worst_resid, 1e-8);
  rec.add("q-agreement", worst_q, 1e-6);
  rec.add("runtime-seconds", seconds, 60.0);
}

void run_condexp_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "condexp"};
  SuiteRecorder ext{out, "extraction"};
  double two_route = 0.0, eq1 = 0.0, idem = 0.0, unital = 0.0, tomiyama = 0.0;
  double choi_min = 0.0;
  double nondist = 0.0, dist_gap = 0.0;
  int failures = 0;
  std::string detail;
  for (int t = 0; t < cfg.sizes.condexp; ++t) {
    const std::uint64_t s = Rng::derive(cfg.seed, 20000 + t);
    try {
      PlantedInstance inst = sample_planted_instance(s, 12, cfg.tol);
      const StatisticalExperiment& e = inst.experiment;
      KIDecomposition k = ki_decomposition(e, cfg.tol, Rng::derive(s, 2));

      const Matrix& v = k.support_isometry;
      StatisticalExperiment er;
      er.dim = k.support_dim();
      er.labels = e.labels;
      for (const Matrix& rho : e.states) {
        Matrix r = v.adjoint() * rho * v;
        er.states.push_back(((r + r.adjoint()) / 2.0).eval());
      }
      const std::vector<double> weights = er.effective_weights();
      const Matrix avg = average_state(er, weights);
      OperatorAlgebra m0 = minimal_sufficient_algebra(er, weights, cfg.tol);
      Superoperator eproj = conditional_expectation(m0, avg, cfg.tol);
      if (cfg.inject_bug)
        eproj = Superoperator::from_choi(eproj.in_dim, eproj.out_dim,
                                         perturb_expectation_choi(eproj.choi, er.dim));
      Superoperator eexpl = explicit_conditional_expectation(k);

      const int ds = er.dim;
      unital = std::max(unital,
                        (apply(eproj, identity(ds), Picture::Heisenberg) - identity(ds)).norm());
      Matrix sym = (eproj.choi + eproj.choi.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
      choi_min = std::min(choi_min, es.eigenvalues().minCoeff());

      Rng probe_rng(Rng::derive(s, 3));
      for (int p = 0; p < 200; ++p) {
        Matrix a = probe_rng.hermitian_probe(ds);
        Matrix pa = apply(eproj, a, Picture::Heisenberg);
        Matrix ea = apply(eexpl, a, Picture::Heisenberg);
        two_route = std::max(two_route, (pa - ea).norm());
        idem = std::max(idem, (apply(eproj, pa, Picture::Heisenberg) - pa).norm());
        for (int l = 0; l < er.num_labels(); ++l)
          eq1 = std::max(eq1, std::abs((er.states[l] * pa).trace() -
                                       (er.states[l] * a).trace()));
      }
      for (int p = 0; p < 20; ++p) {
        Matrix b1 = Matrix::Zero(ds, ds), b2 = Matrix::Zero(ds, ds);
        for (const Matrix& bb : m0.basis) {
          b1 += probe_rng.cnormal() * bb;
          b2 += probe_rng.cnormal() * bb;
        }
        if (b1.norm() > 0.0) b1 /= b1.norm();
        if (b2.norm() > 0.0) b2 /= b2.norm();
        Matrix a = probe_rng.hermitian_probe(ds);
        tomiyama = std::max(
            tomiyama, (apply(eproj, (b1 * a * b2).eval(), Picture::Heisenberg) -
                       b1 * apply(eproj, a, Picture::Heisenberg) * b2)
                          .norm());
      }

      ExtractionInstrument instr = extraction_instrument(k);
      ClassicalExperiment cls = classical_part(k);
      for (int l = 0; l < e.num_labels(); ++l) {
        const Matrix moved = apply(instr.pinching, e.states[l], Picture::Schrodinger);
        nondist = std::max(nondist, trace_norm(moved - e.states[l]));
        const auto& q = cls.distributions.at(e.labels[l]);
        for (std::size_t i = 0; i < k.blocks.size(); ++i) {
          const double stat =
              (instr.pinching.kraus[i] * e.states[l]).trace().real();
          dist_gap = std::max(dist_gap, std::abs(stat - q[i]));
        }
      }
    } catch (const Error& err) {
      ++failures;
      detail = "instance " + std::to_string(t) + ": " + err.what();
    }
  }
  rec.add_count("pipeline", failures, detail);
  rec.add("two-route-agreement", two_route, 1e-7);
  rec.add("state-preservation", eq1, 1e-8);
  rec.add("idempotence", idem, 1e-8);
  rec.add("unitality", unital, 1e-8);
  rec.add("choi-psd-min-eigenvalue", choi_min, -1e-9, false);
  rec.add("tomiyama-module", tomiyama, 1e-8);
  ext.add("non-disturbance", nondist, 1e-9);
  ext.add("distribution-agreement", dist_gap, 1e-10);
}

void run_broadcast_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "broadcast"};
  int verdict_violations = 0;
  double marginal = 0.0;
  std::string detail;
  struct Case {
    StatisticalExperiment e;
    bool broadcastable;
    const char* name;
  };
  const std::vector<Case> cases = {{fixture_identical_states(), true, "identical"},
                                   {fixture_commuting_pair(), true, "commuting"},
                                   {fixture_pure_pair(), false, "pure-pair"}};
  for (const Case& c : cases) {
    try {
      KIDecomposition k = ki_decomposition(c.e, cfg.tol, Rng::derive(cfg.seed, 31));
      if (is_broadcastable(k) != c.broadcastable) {
        ++verdict_violations;
        detail = std::string(c.name) + ": verdict mismatch";
        continue;
      }
      if (!c.broadcastable) {
        bool threw = false;
        try {
          broadcast_channel(k);
        } catch (const Error& err) {
          threw = err.kind() == ErrorKind::NotClassical;
        }
        if (!threw) {
          ++verdict_violations;
          detail = std::string(c.name) + ": witness constructor accepted a quantum block";
        }
        continue;
      }
      Superoperator lam = broadcast_channel(k);
      ChannelReport rep = is_cptp_unital(lam, cfg.tol);
      if (!rep.cp || !rep.tp) {
        ++verdict_violations;
        detail = std::string(c.name) + ": witness is not CPTP";
        continue;
      }
      for (int t = 0; t < c.e.num_labels(); ++t) {
        Matrix omega = apply(lam, c.e.states[t], Picture::Schrodinger);
        Matrix left = partial_trace(omega, c.e.dim, c.e.dim, TraceSide::B);
        Matrix right = partial_trace(omega, c.e.dim, c.e.dim, TraceSide::A);
        marginal = std::max(marginal, trace_norm(left - c.e.states[t]));
        marginal = std::max(marginal, trace_norm(right - c.e.states[t]));
      }
    } catch (const Error& err) {
      ++verdict_violations;
      detail = std::string(c.name) + ": " + err.what();
    }
  }
  rec.add_count("verdicts", verdict_violations, detail);
  rec.add("witness-marginals", marginal, 1e-9);
}

void run_products_ms_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "products-ms"};
  int violations = 0;
  std::string detail;
  for (int t = 0; t < cfg.sizes.pairs; ++t) {
    const std::uint64_t s = Rng::derive(cfg.seed, 40000 + t);
    Rng rng(s);
    try {
      StatisticalExperiment e = sample_pair_factor(rng, Rng::derive(s, 1));
      StatisticalExperiment f = sample_pair_factor(rng, Rng::derive(s, 2));
      ProductMsCheck check = check_product_minimal_sufficiency(e, f, cfg.tol, s);
      if (!check.consistent()) {
        ++violations;
        detail = "pair " + std::to_string(t) + " inconsistent";
      }
    } catch (const Error& err) {
      ++violations;
      detail = "pair " + std::to_string(t) + ": " + err.what();
    }
  }
  rec.add_count("consistency", violations, detail);
}

void run_products_classical_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "products-classical"};
  int violations = 0;
  double worst_q = 0.0;
  std::string detail;
  for (int t = 0; t < cfg.sizes.pairs; ++t) {
    const std::uint64_t s = Rng::derive(cfg.seed, 50000 + t);
    Rng rng(s);
    try {
      StatisticalExperiment e = sample_pair_factor(rng, Rng::derive(s, 1));
      StatisticalExperiment f = sample_pair_factor(rng, Rng::derive(s, 2));
      ProductReport rep = check_product_classical(e, f, cfg.tol, s);
      std::vector<std::pair<int, int>> expected;
      for (const auto& [nl, ml] : rep.left_dims)
        for (const auto& [nr, mr] : rep.right_dims) expected.emplace_back(nl * nr, ml * mr);
      if (!rep.matched || sorted_dims(rep.product_dims) != sorted_dims(expected)) {
        ++violations;
        detail = "pair " + std::to_string(t) + " block dims do not factorize";
        continue;
      }
      worst_q = std::max(worst_q, rep.q_factorization_residual);
    } catch (const Error& err) {
      ++violations;
      detail = "pair " + std::to_string(t) + ": " + err.what();
    }
  }
  rec.add_count("block-dims", violations, detail);
  rec.add("q-factorization", worst_q, 1e-6);
}

void run_invariance_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "invariance"};
  double weight_resid = 0.0, unitary_resid = 0.0;
  int dim_violations = 0, failures = 0;
  std::string detail;
  for (int t = 0; t < cfg.sizes.invariance; ++t) {
    const std::uint64_t s = Rng::derive(cfg.seed, 60000 + t);
    try {
      PlantedInstance inst = sample_planted_instance(s, 8, cfg.tol);
      const StatisticalExperiment& e = inst.experiment;
      Rng rng(Rng::derive(s, 5));

      std::vector<double> w1 = rng.prob_vector(e.num_labels());
      std::vector<double> w2 = rng.prob_vector(e.num_labels());
      OperatorAlgebra a1 = minimal_sufficient_algebra(e, w1, cfg.tol);
      OperatorAlgebra a2 = minimal_sufficient_algebra(e, w2, cfg.tol);
      weight_resid = std::max(weight_resid, mutual_containment_residual(a1, a2));

      Matrix u = rng.haar_unitary(e.dim);
      StatisticalExperiment erot = rotate_experiment(e, u);
      OperatorAlgebra arot = minimal_sufficient_algebra(erot, erot.effective_weights(), cfg.tol);
      OperatorAlgebra a0 = minimal_sufficient_algebra(e, e.effective_weights(), cfg.tol);
      OperatorAlgebra conj;
      conj.ambient_dim = a0.ambient_dim;
      conj.unit = u * a0.unit * u.adjoint();
      for (const Matrix& b : a0.basis) conj.basis.push_back(u * b * u.adjoint());
      unitary_resid = std::max(unitary_resid, mutual_containment_residual(arot, conj));

      KIDecomposition k = ki_decomposition(e, cfg.tol, Rng::derive(s, 6));
      KIDecomposition krot = ki_decomposition(erot, cfg.tol, Rng::derive(s, 7));
      if (sorted_dims(k.block_dims()) != sorted_dims(krot.block_dims())) {
        ++dim_violations;
        detail = "instance " + std::to_string(t) + " block dims not unitarily covariant";
      }
    } catch (const Error& err) {
      ++failures;
      detail = "instance " + std::to_string(t) + ": " + err.what();
    }
  }
  rec.add_count("pipeline", failures, detail);
  rec.add("weight-independence", weight_resid, 1e-8);
  rec.add("unitary-covariance", unitary_resid, 1e-8);
  rec.add_count("block-dims-covariant", dim_violations, detail);
}

void run_fixture_suite(const VerifyConfig& cfg, std::vector<PropertyResult>& out) {
  SuiteRecorder rec{out, "fixtures"};
  StatisticalExperiment commuting = fixture_commuting_pair();
  CocycleGenerators gen = cocycle_generators(commuting, commuting.effective_weights(), cfg.tol);
  Matrix d1_expected(2, 2), d2_expected(2, 2);
  d1_expected << Complex(6.0 / 5.0, 0), Complex(0, 0), Complex(0, 0), Complex(6.0 / 7.0, 0);
  d2_expected << Complex(4.0 / 5.0, 0), Complex(0, 0), Complex(0, 0), Complex(8.0 / 7.0, 0);
  const double dgap = std::max((gen.generators[0] - d1_expected).norm(),
                               (gen.generators[1] - d2_expected).norm());
  rec.add("cocycle-generators", dgap, 1e-12);

  int dim_violations = 0;
  std::string detail;
  const std::vector<std::pair<StatisticalExperiment, int>> cases = {
      {fixture_identical_states(), 1}, {commuting, 2}, {fixture_pure_pair(), 4}};
  for (const auto& [e, expected] : cases) {
    try {
      OperatorAlgebra m0 = minimal_sufficient_algebra(e, e.effective_weights(), cfg.tol);
      if (m0.dimension() != expected) {
        ++dim_violations;
        detail = "algebra dimension " + std::to_string(m0.dimension()) + " != " +
                 std::to_string(expected);
      }
    } catch (const Error& err) {
      ++dim_violations;
      detail = err.what();
    }
  }
  rec.add_count("algebra-dimensions", dim_violations, detail);
}

}  // namespace

StatisticalExperiment fixture_identical_states() {
  StatisticalExperiment e;
  e.dim = 2;
  e.labels = {"a", "b"};
  Matrix rho(2, 2);
  rho << Complex(0.7, 0), Complex(0, 0), Complex(0, 0), Complex(0.3, 0);
  e.states = {rho, rho};
  return e;
}

StatisticalExperiment fixture_commuting_pair() {
  StatisticalExperiment e;
  e.dim = 2;
  e.labels = {"a", "b"};
  Matrix r1(2, 2), r2(2, 2);
  r1 << Complex(0.5, 0), Complex(0, 0), Complex(0, 0), Complex(0.5, 0);
  r2 << Complex(1.0 / 3.0, 0), Complex(0, 0), Complex(0, 0), Complex(2.0 / 3.0, 0);
  e.states = {r1, r2};
  return e;
}

StatisticalExperiment fixture_pure_pair() {
  StatisticalExperiment e;
  e.dim = 2;
  e.labels = {"a", "b"};
  Matrix zero(2, 2), plus(2, 2);
  zero << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  plus << Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0);
  e.states = {zero, plus};
  return e;
}

PlantedInstance sample_planted_instance(std::uint64_t seed, int max_dim, const Tolerance& tol) {
  Rng rng(Rng::derive(seed, 1));
  const int nblocks = 1 + static_cast<int>(rng.uniform_int(0, 3));
  const int nlabels = 2 + static_cast<int>(rng.uniform_int(0, 2));
  std::vector<std::pair<int, int>> dims;
  for (int tries = 0; tries < 1000; ++tries) {
    dims.clear();
    int total = 0;
    for (int b = 0; b < nblocks; ++b) {
      const int n = 1 + static_cast<int>(rng.uniform_int(0, 2));
      const int m = 1 + static_cast<int>(rng.uniform_int(0, 2));
      dims.emplace_back(n, m);
      total += n * m;
    }
    if (total <= max_dim) break;
    dims.clear();
  }
  require(!dims.empty(), ErrorKind::RetriesExhausted, "could not sample block dims");
  return gen_planted(dims, nlabels, Rng::derive(seed, 2), tol);
}

std::vector<PropertyResult> run_verify_suite(const VerifyConfig& config) {
  config.tol.validate();
  std::vector<PropertyResult> out;
  if (suite_selected(config, "planted")) run_planted_suite(config, out);
  if (suite_selected(config, "condexp") || suite_selected(config, "extraction"))
    run_condexp_suite(config, out);
  if (suite_selected(config, "broadcast")) run_broadcast_suite(config, out);
  if (suite_selected(config, "products-ms")) run_products_ms_suite(config, out);
  if (suite_selected(config, "products-classical")) run_products_classical_suite(config, out);
  if (suite_selected(config, "invariance")) run_invariance_suite(config, out);
  if (suite_selected(config, "fixtures")) run_fixture_suite(config, out);
  require(!out.empty(), ErrorKind::InvalidInput, "suite filter matched nothing");
  return out;
}

bool all_pass(const std::vector<PropertyResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace kid
