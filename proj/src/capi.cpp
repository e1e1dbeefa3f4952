#include "kidecomp/kidecomp.h"

#include <cstring>
#include <exception>
#include <string>

#include "kidecomp/classical.hpp"
#include "kidecomp/json_io.hpp"
#include "kidecomp/minimal_sufficiency.hpp"
#include "kidecomp/products.hpp"
#include "kidecomp/rng.hpp"
#include "kidecomp/structure.hpp"
#include "kidecomp/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSchema = "ki-decomp/1";

}  // namespace

struct kid_ctx {
  kid::Tolerance tol;
  std::uint64_t seed = 0;
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

kid::Json report_header(const kid_ctx& ctx, const char* command) {
  return kid::Json{{"schema", kSchema},
                   {"version", kVersion},
                   {"command", command},
                   {"seed", ctx.seed}};
}

template <typename Fn>
int guarded(kid_ctx* ctx, Fn&& fn) {
  if (!ctx) return KID_ERR_INPUT;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const kid::Error& err) {
    ctx->last_error = err.what();
    return err.status_code();
  } catch (const std::exception& err) {
    ctx->last_error = err.what();
    return KID_ERR_NUMERIC;
  }
}

kid::VerifySizes parse_sizes(const char* sizes) {
  kid::VerifySizes out;
  if (!sizes || !*sizes) return out;
  std::string text(sizes);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    kid::require(eq != std::string::npos, kid::ErrorKind::InvalidInput,
                 "sizes item '" + item + "' is not name=count");
    const std::string name = item.substr(0, eq);
    int value = 0;
    try {
      value = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      kid::fail(kid::ErrorKind::InvalidInput, "sizes count in '" + item + "' is not a number");
    }
    kid::require(value > 0, kid::ErrorKind::InvalidInput, "sizes counts must be positive");
    if (name == "planted")
      out.planted = value;
    else if (name == "condexp")
      out.condexp = value;
    else if (name == "pairs")
      out.pairs = value;
    else if (name == "invariance")
      out.invariance = value;
    else
      kid::fail(kid::ErrorKind::InvalidInput, "unknown sizes name '" + name + "'");
    pos = end + 1;
  }
  return out;
}

}  // namespace

extern "C" {

kid_ctx* kid_ctx_new(void) { return new kid_ctx(); }

void kid_ctx_free(kid_ctx* ctx) { delete ctx; }

const char* kid_version(void) { return kVersion; }

const char* kid_last_error(const kid_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

int kid_ctx_set_tolerance(kid_ctx* ctx, double rank_cut, double residual,
                          double cluster_gap) {
  return guarded(ctx, [&] {
    ctx->tol = kid::Tolerance(rank_cut, residual, cluster_gap);
    return KID_OK;
  });
}

void kid_ctx_set_seed(kid_ctx* ctx, uint64_t seed) {
  if (ctx) ctx->seed = seed;
}

void kid_string_free(char* s) { delete[] s; }

int kid_decompose(kid_ctx* ctx, const char* experiment_json, char** decomposition_json,
                  char** report_json) {
  return guarded(ctx, [&] {
    kid::require(experiment_json && decomposition_json && report_json,
                 kid::ErrorKind::InvalidInput, "null argument");
    kid::StatisticalExperiment e =
        kid::experiment_from_json(kid::parse_json(experiment_json));
    kid::KIDecomposition k = kid::ki_decomposition(e, ctx->tol, ctx->seed);
    kid::KIVerifyReport rep = kid::verify_ki(e, k, ctx->tol);

    kid::Json doc = report_header(*ctx, "decompose");
    doc["decomposition"] = kid::decomposition_to_json(k);
    kid::Json repdoc = report_header(*ctx, "decompose");
    repdoc["report"] = kid::ki_verify_report_to_json(rep);
    *decomposition_json = dup_string(doc.dump(2));
    *report_json = dup_string(repdoc.dump(2));
    if (!rep.pass()) {
      ctx->last_error = "decomposition verification failed";
      return KID_ERR_VERIFY;
    }
    return KID_OK;
  });
}

int kid_classical_part(kid_ctx* ctx, const char* experiment_json, char** classical_json) {
  return guarded(ctx, [&] {
    kid::require(experiment_json && classical_json, kid::ErrorKind::InvalidInput,
                 "null argument");
    kid::StatisticalExperiment e =
        kid::experiment_from_json(kid::parse_json(experiment_json));
    kid::KIDecomposition k = kid::ki_decomposition(e, ctx->tol, ctx->seed);
    kid::Json doc = report_header(*ctx, "classical");
    doc["classical_part"] = kid::classical_to_json(kid::classical_part(k));
    *classical_json = dup_string(doc.dump(2));
    return KID_OK;
  });
}

int kid_broadcast_check(kid_ctx* ctx, const char* experiment_json, char** verdict_json) {
  return guarded(ctx, [&] {
    kid::require(experiment_json && verdict_json, kid::ErrorKind::InvalidInput,
                 "null argument");
    kid::StatisticalExperiment e =
        kid::experiment_from_json(kid::parse_json(experiment_json));
    kid::KIDecomposition k = kid::ki_decomposition(e, ctx->tol, ctx->seed);
    kid::Json doc = report_header(*ctx, "broadcast-check");
    const bool verdict = kid::is_broadcastable(k);
    doc["broadcastable"] = verdict;
    if (verdict) {
      kid::Superoperator lam = kid::broadcast_channel(k);
      double marginal = 0.0;
      for (int t = 0; t < e.num_labels(); ++t) {
        kid::Matrix omega = kid::apply(lam, e.states[t], kid::Picture::Schrodinger);
        marginal = std::max(
            marginal, kid::trace_norm(
                          kid::partial_trace(omega, e.dim, e.dim, kid::TraceSide::B) -
                          e.states[t]));
        marginal = std::max(
            marginal, kid::trace_norm(
                          kid::partial_trace(omega, e.dim, e.dim, kid::TraceSide::A) -
                          e.states[t]));
      }
      doc["witness"] = kid::channel_to_json(lam);
      doc["witness_marginal_residual"] = marginal;
      if (marginal > ctx->tol.residual) {
        *verdict_json = dup_string(doc.dump(2));
        ctx->last_error = "broadcast witness failed its marginal check";
        return KID_ERR_VERIFY;
      }
    }
    *verdict_json = dup_string(doc.dump(2));
    return KID_OK;
  });
}

int kid_tensor_check(kid_ctx* ctx, const char* left_json, const char* right_json,
                     char** report_json) {
  return guarded(ctx, [&] {
    kid::require(left_json && right_json && report_json, kid::ErrorKind::InvalidInput,
                 "null argument");
    kid::StatisticalExperiment e = kid::experiment_from_json(kid::parse_json(left_json));
    kid::StatisticalExperiment f = kid::experiment_from_json(kid::parse_json(right_json));
    kid::ProductReport rep = kid::check_product_classical(e, f, ctx->tol, ctx->seed);
    kid::ProductMsCheck ms = kid::check_product_minimal_sufficiency(e, f, ctx->tol, ctx->seed);
    rep.minimal_sufficiency_checks = ms;
    kid::Json doc = report_header(*ctx, "tensor-check");
    doc["product_report"] = kid::product_report_to_json(rep);
    doc["minimal_sufficiency_consistent"] = ms.consistent();
    *report_json = dup_string(doc.dump(2));
    if (!ms.consistent()) {
      ctx->last_error = "product minimal sufficiency inconsistent with factors";
      return KID_ERR_VERIFY;
    }
    return KID_OK;
  });
}

int kid_gen_planted(kid_ctx* ctx, const char* blocks_spec, int num_labels,
                    char** experiment_json, char** ground_truth_json) {
  return guarded(ctx, [&] {
    kid::require(blocks_spec && experiment_json && ground_truth_json,
                 kid::ErrorKind::InvalidInput, "null argument");
    kid::Json spec = kid::parse_json(blocks_spec);
    kid::require(spec.is_array() && !spec.empty(), kid::ErrorKind::InvalidInput,
                 "blocks spec must be a non-empty array of [n,m] pairs");
    std::vector<std::pair<int, int>> dims;
    for (const auto& item : spec) {
      kid::require(item.is_array() && item.size() == 2 && item[0].is_number_integer() &&
                       item[1].is_number_integer(),
                   kid::ErrorKind::InvalidInput, "each block must be an [n,m] integer pair");
      dims.emplace_back(item[0].get<int>(), item[1].get<int>());
    }
    kid::PlantedInstance inst = kid::gen_planted(dims, num_labels, ctx->seed, ctx->tol);
    *experiment_json = dup_string(kid::experiment_to_json(inst.experiment).dump(2));
    kid::Json gt = report_header(*ctx, "gen-planted");
    gt["ground_truth"] = kid::ground_truth_to_json(inst.truth, inst.experiment.labels);
    *ground_truth_json = dup_string(gt.dump(2));
    return KID_OK;
  });
}

int kid_verify(kid_ctx* ctx, const char* suite, const char* sizes, int inject_bug,
               char** report_json) {
  return guarded(ctx, [&] {
    kid::require(report_json, kid::ErrorKind::InvalidInput, "null argument");
    kid::VerifyConfig config;
    config.seed = ctx->seed;
    config.tol = ctx->tol;
    config.sizes = parse_sizes(sizes);
    if (suite) config.suite = suite;
    config.inject_bug = inject_bug != 0;
    std::vector<kid::PropertyResult> results = kid::run_verify_suite(config);

    kid::Json props = kid::Json::array();
    for (const auto& r : results)
      props.push_back(kid::Json{{"name", r.name},
                                {"worst", r.worst},
                                {"threshold", r.threshold},
                                {"pass", r.pass},
                                {"detail", r.detail}});
    kid::Json doc = report_header(*ctx, "verify");
    doc["properties"] = std::move(props);
    const bool ok = kid::all_pass(results);
    doc["all_pass"] = ok;
    *report_json = dup_string(doc.dump(2));
    if (!ok) {
      std::string failing;
      for (const auto& r : results)
        if (!r.pass) failing += (failing.empty() ? "" : ", ") + r.name;
      ctx->last_error = "failed properties: " + failing;
      return KID_ERR_VERIFY;
    }
    return KID_OK;
  });
}

}  // extern "C"
