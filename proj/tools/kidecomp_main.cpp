// Command-line front end. Talks to the core exclusively through the C API;
// exit codes are the API status codes.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kidecomp/kidecomp.h"

namespace {

using Json = nlohmann::json;

struct CtxDeleter {
  void operator()(kid_ctx* c) const { kid_ctx_free(c); }
};
using CtxPtr = std::unique_ptr<kid_ctx, CtxDeleter>;

struct CommonOpts {
  std::uint64_t seed = 0;
  double tol_rank = 1e-9;
  double tol_residual = 1e-8;
  double cluster_gap = 1e-6;
  std::string format = "json";
  std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "run seed")->envname("KIDECOMP_SEED");
  cmd->add_option("--tol-rank", opts.tol_rank, "relative rank cutoff");
  cmd->add_option("--tol-residual", opts.tol_residual, "verification residual");
  cmd->add_option("--cluster-gap", opts.cluster_gap, "eigenvalue clustering gap");
  cmd->add_option("--format", opts.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--output", opts.output, "write the result here instead of stdout");
}

int configure(kid_ctx* ctx, const CommonOpts& opts) {
  kid_ctx_set_seed(ctx, opts.seed);
  return kid_ctx_set_tolerance(ctx, opts.tol_rank, opts.tol_residual, opts.cluster_gap);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move '" + tmp + "' to '" + path + "'");
}

void emit(const CommonOpts& opts, const std::string& content) {
  if (opts.output.empty())
    std::cout << content << "\n";
  else
    write_file_atomic(opts.output, content);
}

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { kid_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

int report_error(kid_ctx* ctx, int code) {
  std::cerr << "error: " << kid_last_error(ctx) << "\n";
  return code;
}

std::string render_verify_text(const std::string& json_text) {
  Json doc = Json::parse(json_text);
  std::ostringstream out;
  for (const auto& p : doc["properties"]) {
    out << (p["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << p["name"].get<std::string>()
        << "  worst=" << p["worst"].get<double>()
        << "  threshold=" << p["threshold"].get<double>();
    const std::string detail = p["detail"].get<std::string>();
    if (!detail.empty()) out << "  (" << detail << ")";
    out << "\n";
  }
  out << (doc["all_pass"].get<bool>() ? "all properties passed" : "some properties FAILED");
  return out.str();
}

std::string render_decompose_text(const std::string& dec_text, const std::string& rep_text) {
  Json dec = Json::parse(dec_text);
  Json rep = Json::parse(rep_text);
  std::ostringstream out;
  const auto& blocks = dec["decomposition"]["blocks"];
  out << blocks.size() << " block(s):";
  for (const auto& b : blocks) out << " (" << b["n"].get<int>() << "," << b["m"].get<int>() << ")";
  out << "\n";
  for (const auto& it : rep["report"]["items"]) {
    if (!it["pass"].get<bool>())
      out << "[FAIL] " << it["name"].get<std::string>() << " value=" << it["value"].get<double>()
          << "\n";
  }
  out << (rep["report"]["pass"].get<bool>() ? "verification passed" : "verification FAILED");
  return out.str();
}

// Accepts "2x1,1x2" or "(2,1),(1,2)" or a JSON array; emits the JSON array
// form the C API expects.
std::string blocks_to_json_spec(const std::string& text) {
  if (!text.empty() && text.front() == '[') return text;
  std::string cleaned;
  for (char c : text) {
    if (c == '(' || c == ')' || c == ' ') continue;
    cleaned.push_back(c == 'x' ? ',' : c);
  }
  std::vector<int> nums;
  std::stringstream ss(cleaned);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    nums.push_back(std::stoi(item));
  }
  if (nums.empty() || nums.size() % 2 != 0)
    throw std::runtime_error("blocks spec must list n,m pairs");
  Json arr = Json::array();
  for (std::size_t i = 0; i < nums.size(); i += 2)
    arr.push_back(Json::array({nums[i], nums[i + 1]}));
  return arr.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koashi-Imoto decomposition toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* decompose = app.add_subcommand("decompose", "block decomposition of an experiment");
  std::string input;
  std::string report_output;
  decompose->add_option("--input", input, "experiment JSON file")->required();
  decompose->add_option("--report-output", report_output, "write the verification report here");
  add_common(decompose, opts);

  auto* classical = app.add_subcommand("classical", "classical part of an experiment");
  classical->add_option("--input", input, "experiment JSON file")->required();
  add_common(classical, opts);

  auto* broadcast = app.add_subcommand("broadcast-check", "broadcastability with witness");
  broadcast->add_option("--input", input, "experiment JSON file")->required();
  add_common(broadcast, opts);

  auto* tensor = app.add_subcommand("tensor-check", "direct-product decomposition checks");
  std::vector<std::string> inputs;
  tensor->add_option("--input", inputs, "two experiment JSON files")
      ->expected(2)
      ->required();
  add_common(tensor, opts);

  auto* gen = app.add_subcommand("gen-planted", "sample a planted instance");
  std::string blocks;
  std::string ground_truth_path;
  int labels = 2;
  int dim_check = -1;
  gen->add_option("--blocks", blocks, "block dims, e.g. 2x1,1x2")->required();
  gen->add_option("--labels", labels, "number of labels");
  gen->add_option("--dim", dim_check, "expected total dimension (consistency check)");
  gen->add_option("--ground-truth", ground_truth_path, "ground truth output file");
  add_common(gen, opts);

  auto* verify = app.add_subcommand("verify", "run the property ensembles");
  std::string suite;
  std::string sizes;
  bool inject_bug = false;
  verify->add_option("--suite", suite, "suite name prefix filter");
  verify->add_option("--sizes", sizes, "e.g. planted=100,condexp=50,pairs=50,invariance=25");
  verify->add_flag("--inject-bug", inject_bug, "corrupt the expectation (harness self-test)");
  add_common(verify, opts);

  CLI11_PARSE(app, argc, argv);

  CtxPtr ctx(kid_ctx_new());
  if (int rc = configure(ctx.get(), opts); rc != KID_OK) return report_error(ctx.get(), rc);

  try {
    if (decompose->parsed()) {
      const std::string text = read_file(input);
      OwnedString dec, rep;
      const int rc = kid_decompose(ctx.get(), text.c_str(), &dec.value, &rep.value);
      if (rc != KID_OK && !dec.value) return report_error(ctx.get(), rc);
      if (opts.format == "text") {
        emit(opts, render_decompose_text(dec.str(), rep.str()));
      } else {
        emit(opts, dec.str());
        if (!report_output.empty())
          write_file_atomic(report_output, rep.str());
        else if (!opts.output.empty())
          std::cout << rep.str() << "\n";
        else
          std::cout << rep.str() << "\n";
      }
      if (rc != KID_OK) return report_error(ctx.get(), rc);
      return KID_OK;
    }
    if (classical->parsed()) {
      OwnedString out;
      const int rc = kid_classical_part(ctx.get(), read_file(input).c_str(), &out.value);
      if (rc != KID_OK) return report_error(ctx.get(), rc);
      emit(opts, out.str());
      return KID_OK;
    }
    if (broadcast->parsed()) {
      OwnedString out;
      const int rc = kid_broadcast_check(ctx.get(), read_file(input).c_str(), &out.value);
      if (rc != KID_OK && !out.value) return report_error(ctx.get(), rc);
      if (opts.format == "text") {
        Json doc = Json::parse(out.str());
        std::ostringstream line;
        line << (doc["broadcastable"].get<bool>() ? "broadcastable" : "not broadcastable");
        if (doc.contains("witness_marginal_residual"))
          line << " (witness marginal residual " << doc["witness_marginal_residual"].get<double>()
               << ")";
        emit(opts, line.str());
      } else {
        emit(opts, out.str());
      }
      if (rc != KID_OK) return report_error(ctx.get(), rc);
      return KID_OK;
    }
    if (tensor->parsed()) {
      OwnedString out;
      const std::string left = read_file(inputs[0]);
      const std::string right = read_file(inputs[1]);
      const int rc = kid_tensor_check(ctx.get(), left.c_str(), right.c_str(), &out.value);
      if (rc != KID_OK && !out.value) return report_error(ctx.get(), rc);
      emit(opts, out.str());
      if (rc != KID_OK) return report_error(ctx.get(), rc);
      return KID_OK;
    }
    if (gen->parsed()) {
      const std::string spec = blocks_to_json_spec(blocks);
      if (dim_check >= 0) {
        Json arr = Json::parse(spec);
        int total = 0;
        for (const auto& p : arr) total += p[0].get<int>() * p[1].get<int>();
        if (total != dim_check) {
          std::cerr << "error: blocks sum to dimension " << total << ", expected " << dim_check
                    << "\n";
          return KID_ERR_INPUT;
        }
      }
      OwnedString experiment, truth;
      const int rc =
          kid_gen_planted(ctx.get(), spec.c_str(), labels, &experiment.value, &truth.value);
      if (rc != KID_OK) return report_error(ctx.get(), rc);
      emit(opts, experiment.str());
      if (!ground_truth_path.empty()) write_file_atomic(ground_truth_path, truth.str());
      return KID_OK;
    }
    if (verify->parsed()) {
      OwnedString out;
      const int rc = kid_verify(ctx.get(), suite.empty() ? nullptr : suite.c_str(),
                                sizes.empty() ? nullptr : sizes.c_str(), inject_bug ? 1 : 0,
                                &out.value);
      if (rc != KID_OK && !out.value) return report_error(ctx.get(), rc);
      emit(opts, opts.format == "text" ? render_verify_text(out.str()) : out.str());
      if (rc != KID_OK) {
        std::cerr << "error: " << kid_last_error(ctx.get()) << "\n";
        return rc;
      }
      return KID_OK;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return KID_ERR_INPUT;
  }
  return KID_ERR_INPUT;
}
