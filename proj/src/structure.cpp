#include "kidecomp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kidecomp/rng.hpp"

namespace kid {

namespace {

constexpr int kMaxDraws = 10;
constexpr std::uint64_t kProbeSeed = 0x5eedf00d1234ULL;

Matrix range_basis(const Matrix& projection, const Tolerance& tol) {
  EighResult es = eigh(projection, tol);
  std::vector<int> kept;
  for (int k = 0; k < es.eigenvalues.size(); ++k)
    if (es.eigenvalues[k] > 0.5) kept.push_back(k);
  Matrix w(projection.rows(), kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) w.col(j) = es.eigenvectors.col(kept[j]);
  return w;
}

// Compression of an algebra by a projection below its unit, in the
// coordinates of range(p).
OperatorAlgebra compress_algebra(const OperatorAlgebra& a, const Matrix& w,
                                 const Tolerance& tol) {
  std::vector<Matrix> mats;
  mats.reserve(a.basis.size());
  for (const Matrix& b : a.basis) mats.push_back(w.adjoint() * b * w);
  OperatorSubspace span = orthonormalize_span(mats, tol);
  OperatorAlgebra out;
  out.ambient_dim = span.ambient_dim;
  out.basis = std::move(span.basis);
  out.unit = identity(out.ambient_dim);
  return out;
}

Matrix random_hermitian_element(const OperatorSubspace& s, Rng& rng) {
  Matrix h = Matrix::Zero(s.ambient_dim, s.ambient_dim);
  for (const Matrix& b : s.basis) {
    const Complex c = rng.cnormal();
    h += c * b + std::conj(c) * b.adjoint();
  }
  return (h + h.adjoint()) / 2.0;
}

Matrix random_element(const OperatorSubspace& s, Rng& rng) {
  Matrix x = Matrix::Zero(s.ambient_dim, s.ambient_dim);
  for (const Matrix& b : s.basis) x += rng.cnormal() * b;
  return x;
}

// Groups sorted eigenvalues into clusters separated by more than
// cluster_gap relative to the spectral range.
std::vector<std::pair<int, int>> cluster_ranges(const RealVector& lam, double cluster_gap) {
  std::vector<std::pair<int, int>> ranges;
  const int n = static_cast<int>(lam.size());
  if (n == 0) return ranges;
  const double span = std::max(1.0, lam[n - 1] - lam[0]);
  int start = 0;
  for (int k = 1; k < n; ++k) {
    if (lam[k] - lam[k - 1] > cluster_gap * span) {
      ranges.emplace_back(start, k);
      start = k;
    }
  }
  ranges.emplace_back(start, n);
  return ranges;
}

}  // namespace

std::vector<std::pair<int, int>> KIDecomposition::block_dims() const {
  std::vector<std::pair<int, int>> dims;
  dims.reserve(blocks.size());
  for (const Block& b : blocks) dims.emplace_back(b.n, b.m);
  return dims;
}

std::vector<Projection> minimal_central_projections(const OperatorAlgebra& a,
                                                    const Tolerance& tol,
                                                    std::uint64_t seed) {
  require(a.dimension() > 0, ErrorKind::InvalidInput, "empty algebra");
  const OperatorAlgebra z = center(a, tol);
  const int zdim = z.dimension();
  const int unit_rank = static_cast<int>(std::lround(a.unit.trace().real()));
  if (zdim == 1) return {Projection{a.unit, unit_rank}};

  Rng rng(seed);
  const Matrix w = range_basis(a.unit, tol);
  const int r = static_cast<int>(w.cols());

  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    Matrix c = random_hermitian_element(z, rng);
    EighResult es = eigh((w.adjoint() * c * w).eval(), tol);
    auto ranges = cluster_ranges(es.eigenvalues, tol.cluster_gap);
    if (static_cast<int>(ranges.size()) != zdim) continue;

    std::vector<Projection> projs;
    Matrix sum = Matrix::Zero(a.ambient_dim, a.ambient_dim);
    bool ok = true;
    for (const auto& [lo, hi] : ranges) {
      Matrix pt = Matrix::Zero(r, r);
      for (int k = lo; k < hi; ++k)
        pt += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
      Matrix p = w * pt * w.adjoint();
      p = (p + p.adjoint()) / 2.0;
      if ((p * p - p).norm() > tol.residual || !contains(z, p, tol)) {
        ok = false;
        break;
      }
      sum += p;
      projs.push_back({std::move(p), hi - lo});
    }
    if (!ok || (sum - a.unit).norm() > tol.residual) continue;

    // Minimality: the compression by each projection must be a factor.
    for (const Projection& p : projs) {
      OperatorAlgebra comp = compress_algebra(a, range_basis(p.matrix, tol), tol);
      if (center(comp, tol).dimension() != 1) {
        ok = false;
        break;
      }
    }
    if (ok) return projs;
  }
  fail(ErrorKind::RetriesExhausted,
       "central eigenvalue clustering stayed ambiguous; check cluster_gap");
}

BlockFactorization factorize_block(const OperatorAlgebra& a, const Projection& p,
                                   const Tolerance& tol, std::uint64_t seed) {
  const Matrix w = range_basis(p.matrix, tol);
  const int r = static_cast<int>(w.cols());
  OperatorAlgebra b = compress_algebra(a, w, tol);

  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(b.dimension()))));
  require(n * n == b.dimension(), ErrorKind::NonIntegralMultiplicity,
          "compressed block dimension is not a perfect square");
  require(r % n == 0, ErrorKind::NonIntegralMultiplicity,
          "projection rank is not a multiple of the factor dimension");
  const int m = r / n;

  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    // Minimal projection by iterated spectral splitting of generic
    // Hermitian elements of the compressed corner.
    Matrix e = identity(r);
    bool ok = true;
    for (int split = 0; split <= n * n; ++split) {
      std::vector<Matrix> corner_mats;
      for (const Matrix& bb : b.basis) corner_mats.push_back(e * bb * e);
      OperatorSubspace corner = orthonormalize_span(corner_mats, tol);
      if (corner.dimension() == 1) break;
      if (split == n * n) {
        ok = false;
        break;
      }
      Matrix we = range_basis(e, tol);
      bool split_done = false;
      for (int draw = 0; draw < kMaxDraws; ++draw) {
        Matrix h = random_hermitian_element(corner, rng);
        EighResult es = eigh((we.adjoint() * h * we).eval(), tol);
        auto ranges = cluster_ranges(es.eigenvalues, tol.cluster_gap);
        if (ranges.size() < 2) continue;
        const auto& [lo, hi] = ranges.front();
        Matrix pt = Matrix::Zero(we.cols(), we.cols());
        for (int k = lo; k < hi; ++k)
          pt += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
        Matrix enew = we * pt * we.adjoint();
        e = (enew + enew.adjoint()) / 2.0;
        split_done = true;
        break;
      }
      if (!split_done) {
        ok = false;
        break;
      }
    }
    if (!ok || std::lround(e.trace().real()) != m) continue;

    // Complete e to n equivalent orthogonal minimal projections, linked by
    // partial isometries from polar decompositions of connecting elements.
    std::vector<Matrix> projections{e};
    std::vector<Matrix> isometries{e};
    Matrix f = identity(r) - e;
    while (static_cast<int>(projections.size()) < n && ok) {
      bool found = false;
      for (int draw = 0; draw < kMaxDraws; ++draw) {
        Matrix t = f * random_element(b, rng) * e;
        const double c = (t.adjoint() * t).trace().real() / m;
        if (!(c > 1e-12)) continue;
        Matrix v = t / std::sqrt(c);
        if ((v.adjoint() * v - e).norm() > 1e-7) continue;
        Matrix enew = v * v.adjoint();
        enew = (enew + enew.adjoint()) / 2.0;
        projections.push_back(enew);
        isometries.push_back(std::move(v));
        f -= enew;
        found = true;
        break;
      }
      if (!found) ok = false;
    }
    if (!ok) continue;

    // Coordinates: U sends v_k w_s to |k>|s>, so U e_kl U† = E_kl (x) 1_m.
    Matrix we1 = range_basis(e, tol);
    Matrix u(r, r);
    for (int k = 0; k < n; ++k)
      for (int s = 0; s < m; ++s)
        u.row(k * m + s) = (isometries[k] * we1.col(s)).adjoint();
    if ((u * u.adjoint() - identity(r)).norm() > 1e-7) continue;

    // The transformed basis must consist of ampliated n x n matrices.
    bool structure_ok = true;
    for (const Matrix& bb : b.basis) {
      Matrix bt = u * bb * u.adjoint();
      Matrix y = partial_trace(bt, n, m, TraceSide::B) / m;
      if ((bt - kron(y, identity(m))).norm() > tol.residual * std::max(1.0, bt.norm())) {
        structure_ok = false;
        break;
      }
    }
    if (!structure_ok) continue;

    BlockFactorization out;
    out.n = n;
    out.m = m;
    out.unitary = u * w.adjoint();
    out.matrix_units.reserve(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        out.matrix_units.push_back(w * (isometries[k] * isometries[l].adjoint()) * w.adjoint());
    return out;
  }
  fail(ErrorKind::RetriesExhausted, "block factorization kept drawing degenerate elements");
}

namespace {

Matrix block_compress(const Block& blk, const Matrix& x) {
  return blk.unitary * x * blk.unitary.adjoint();
}

Matrix block_embed(const Block& blk, const Matrix& y, int support_dim) {
  Matrix out = blk.unitary.adjoint() * y * blk.unitary;
  (void)support_dim;
  return out;
}

Matrix reconstruct_support_state(const KIDecomposition& k, int t) {
  const int ds = k.support_dim();
  Matrix acc = Matrix::Zero(ds, ds);
  for (const Block& blk : k.blocks)
    acc += block_embed(blk, (blk.q[t] * kron(blk.rho_theta[t], blk.sigma)).eval(), ds);
  return acc;
}

bool block_order_before(const Block& a, const Block& b) {
  if (a.n != b.n) return a.n < b.n;
  if (a.m != b.m) return a.m < b.m;
  if (std::abs(a.q[0] - b.q[0]) > 0.0) return a.q[0] > b.q[0];
  EighResult ea = eigh(a.sigma);
  EighResult eb = eigh(b.sigma);
  for (int i = 0; i < a.m; ++i) {
    const double la = ea.eigenvalues[a.m - 1 - i];
    const double lb = eb.eigenvalues[b.m - 1 - i];
    if (la != lb) return la > lb;
  }
  return false;
}

}  // namespace

KIDecomposition ki_decomposition(const StatisticalExperiment& e, const Tolerance& tol,
                                 std::uint64_t seed) {
  ValidationReport val = validate(e, tol);
  require(val.ok(), ErrorKind::InvalidInput,
          val.ok() ? "" : "invalid experiment: " + val.violations.front());

  RestrictedExperiment restricted = restrict_to_joint_support(e, tol);
  const StatisticalExperiment& er = restricted.experiment;
  const std::vector<double> weights = er.effective_weights();
  const Matrix avg = average_state(er, weights);

  OperatorAlgebra m0 = minimal_sufficient_algebra(er, weights, tol);
  std::vector<Projection> projs = minimal_central_projections(m0, tol, Rng::derive(seed, 1));

  KIDecomposition out;
  out.support_isometry = restricted.isometry;
  out.source_dim = e.dim;
  out.labels = e.labels;

  const int nlabels = er.num_labels();
  for (std::size_t i = 0; i < projs.size(); ++i) {
    BlockFactorization fact =
        factorize_block(m0, projs[i], tol, Rng::derive(seed, 2 + static_cast<int>(i)));
    Block blk;
    blk.projection = projs[i];
    blk.n = fact.n;
    blk.m = fact.m;
    blk.unitary = fact.unitary;

    // Canonical bases: K-side diagonalizes sigma descending, H-side
    // diagonalizes the average's block state descending.
    const Matrix& pm = blk.projection.matrix;
    Matrix avg_block = block_compress(blk, (pm * avg * pm).eval());
    Matrix sigma_raw = partial_trace(avg_block, blk.n, blk.m, TraceSide::A);
    sigma_raw /= sigma_raw.trace().real();
    EighResult es_sigma = eigh(sigma_raw, tol);
    Matrix wm(blk.m, blk.m);
    for (int c = 0; c < blk.m; ++c) wm.col(c) = es_sigma.eigenvectors.col(blk.m - 1 - c);
    Matrix rho_bar = partial_trace(avg_block, blk.n, blk.m, TraceSide::B);
    rho_bar /= rho_bar.trace().real();
    EighResult es_rho = eigh(rho_bar, tol);
    Matrix wn(blk.n, blk.n);
    for (int c = 0; c < blk.n; ++c) wn.col(c) = es_rho.eigenvectors.col(blk.n - 1 - c);
    blk.unitary = kron(wn.adjoint(), wm.adjoint()) * blk.unitary;

    avg_block = block_compress(blk, (pm * avg * pm).eval());
    Matrix sigma = partial_trace(avg_block, blk.n, blk.m, TraceSide::A);
    sigma /= sigma.trace().real();
    blk.sigma = (sigma + sigma.adjoint()) / 2.0;

    blk.q.resize(nlabels);
    blk.rho_theta.resize(nlabels);
    blk.q_zero.assign(nlabels, false);
    for (int t = 0; t < nlabels; ++t) {
      const Matrix& rho = er.states[t];
      blk.q[t] = (rho * pm).trace().real();
      if (blk.q[t] <= tol.residual) {
        blk.q[t] = std::max(blk.q[t], 0.0);
        blk.q_zero[t] = true;
        blk.rho_theta[t] = identity(blk.n) / blk.n;
        continue;
      }
      Matrix rb = block_compress(blk, (pm * rho * pm).eval());
      Matrix rho_i = partial_trace(rb, blk.n, blk.m, TraceSide::B) / blk.q[t];
      blk.rho_theta[t] = (rho_i + rho_i.adjoint()) / 2.0;
    }
    out.blocks.push_back(std::move(blk));
  }

  std::stable_sort(out.blocks.begin(), out.blocks.end(), block_order_before);

  std::vector<double> residuals = reconstruction_residuals(e, out);
  for (int t = 0; t < nlabels; ++t)
    if (residuals[t] > tol.residual)
      fail(ErrorKind::VerificationFailed,
           "reconstruction residual " + std::to_string(residuals[t]) + " for label '" +
               e.labels[t] + "' exceeds " + std::to_string(tol.residual));
  return out;
}

std::vector<double> reconstruction_residuals(const StatisticalExperiment& e,
                                             const KIDecomposition& k) {
  require(e.dim == k.source_dim, ErrorKind::ShapeMismatch, "decomposition belongs to another space");
  const Matrix& v = k.support_isometry;
  std::vector<double> out;
  out.reserve(e.states.size());
  for (std::size_t t = 0; t < e.states.size(); ++t) {
    Matrix recon = v * reconstruct_support_state(k, static_cast<int>(t)) * v.adjoint();
    out.push_back((e.states[t] - recon).norm());
  }
  return out;
}

Superoperator explicit_conditional_expectation(const KIDecomposition& k) {
  const int ds = k.support_dim();
  return Superoperator::from_heisenberg_action(ds, ds, [&](const Matrix& x) {
    Matrix acc = Matrix::Zero(ds, ds);
    for (const Block& blk : k.blocks) {
      const Matrix& pm = blk.projection.matrix;
      Matrix xb = block_compress(blk, (pm * x * pm).eval());
      Matrix y =
          partial_trace((xb * kron(identity(blk.n), blk.sigma)).eval(), blk.n, blk.m,
                        TraceSide::B);
      acc += block_embed(blk, kron(y, identity(blk.m)).eval(), ds);
    }
    return acc;
  });
}

KIVerifyReport verify_ki(const StatisticalExperiment& e, const KIDecomposition& k,
                         const Tolerance& tol) {
  KIVerifyReport rep;
  auto add = [&rep](const std::string& name, double value, double threshold, bool below) {
    rep.items.push_back({name, value, threshold, below ? value <= threshold : value > threshold});
  };

  std::vector<double> residuals = reconstruction_residuals(e, k);
  for (std::size_t t = 0; t < residuals.size(); ++t)
    add("reconstruction/" + e.labels[t], residuals[t], tol.residual, true);

  const int ds = k.support_dim();
  double idem = 0.0, ortho = 0.0;
  Matrix sum = Matrix::Zero(ds, ds);
  int rank_sum = 0;
  for (std::size_t i = 0; i < k.blocks.size(); ++i) {
    const Matrix& p = k.blocks[i].projection.matrix;
    idem = std::max(idem, std::max((p * p - p).norm(), (p - p.adjoint()).norm()));
    sum += p;
    rank_sum += k.blocks[i].projection.rank;
    for (std::size_t j = i + 1; j < k.blocks.size(); ++j)
      ortho = std::max(ortho, (p * k.blocks[j].projection.matrix).norm());
  }
  add("projections/idempotent", idem, tol.residual, true);
  add("projections/orthogonal", ortho, tol.residual, true);
  add("projections/complete", (sum - identity(ds)).norm(), tol.residual, true);
  add("projections/rank-sum", std::abs(static_cast<double>(rank_sum - ds)), 0.5, true);

  for (std::size_t i = 0; i < k.blocks.size(); ++i) {
    EighResult es = eigh(k.blocks[i].sigma, tol);
    add("sigma-faithful/block" + std::to_string(i), es.eigenvalues.minCoeff(),
        tol.rank_cut * es.eigenvalues.maxCoeff(), false);
  }
  for (std::size_t t = 0; t < e.labels.size(); ++t) {
    double qsum = 0.0;
    for (const Block& blk : k.blocks) qsum += blk.q[t];
    add("weights-normalized/" + e.labels[t], std::abs(qsum - 1.0), 10.0 * tol.residual, true);
  }

  // Two constructions of the expectation must agree, and both must leave
  // every state's expectation values unchanged.
  try {
    const Matrix& v = k.support_isometry;
    StatisticalExperiment er;
    er.dim = ds;
    er.labels = e.labels;
    er.weights = e.weights;
    for (const Matrix& rho : e.states) {
      Matrix r = v.adjoint() * rho * v;
      er.states.push_back(((r + r.adjoint()) / 2.0).eval());
    }
    const std::vector<double> weights = er.effective_weights();
    Matrix avg = average_state(er, weights);
    OperatorAlgebra m0 = minimal_sufficient_algebra(er, weights, tol);
    Superoperator proj = conditional_expectation(m0, avg, tol);
    Superoperator expl = explicit_conditional_expectation(k);

    int sq = 0;
    for (const Block& blk : k.blocks) sq += blk.n * blk.n;
    add("algebra/block-dimension-sum", std::abs(static_cast<double>(sq - m0.dimension())), 0.5,
        true);

    Rng rng(kProbeSeed);
    double route_gap = 0.0, eq1 = 0.0;
    for (int probe = 0; probe < 200; ++probe) {
      Matrix a = rng.hermitian_probe(ds);
      Matrix pa = apply(proj, a, Picture::Heisenberg);
      Matrix ea = apply(expl, a, Picture::Heisenberg);
      route_gap = std::max(route_gap, (pa - ea).norm());
      for (int t = 0; t < er.num_labels(); ++t)
        eq1 = std::max(eq1, std::abs((er.states[t] * ea).trace() -
                                     (er.states[t] * a).trace()));
    }
    add("expectation/two-route-agreement", route_gap, 1e-7, true);
    add("expectation/state-preservation", eq1, 1e-8, true);
  } catch (const Error& err) {
    rep.items.push_back({std::string("expectation/pipeline (") + err.what() + ")",
                         std::numeric_limits<double>::infinity(), 0.0, false});
  }
  return rep;
}

}  // namespace kid
