#include "kidecomp/json_io.hpp"

#include <cmath>
#include <set>

namespace kid {

namespace {

void require_keys(const Json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const char* what) {
  require(j.is_object(), ErrorKind::InvalidInput, std::string(what) + " must be a JSON object");
  for (const auto& key : required)
    require(j.contains(key), ErrorKind::InvalidInput,
            std::string(what) + " misses field '" + key + "'");
  for (const auto& item : j.items())
    require(required.count(item.key()) || optional.count(item.key()), ErrorKind::InvalidInput,
            std::string(what) + " has unknown field '" + item.key() + "'");
}

Json real_part_rows(const Matrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorKind::InvalidInput, "malformed JSON");
  return j;
}

Json matrix_to_json(const Matrix& m) {
  return Json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"re", real_part_rows(m, false)},
              {"im", real_part_rows(m, true)}};
}

Matrix matrix_from_json(const Json& j) {
  require_keys(j, {"rows", "cols", "re", "im"}, {}, "matrix");
  require(j["rows"].is_number_integer() && j["cols"].is_number_integer(),
          ErrorKind::InvalidInput, "matrix dims must be integers");
  const int rows = j["rows"].get<int>();
  const int cols = j["cols"].get<int>();
  require(rows > 0 && cols > 0, ErrorKind::InvalidInput, "matrix dims must be positive");
  const Json& re = j["re"];
  const Json& im = j["im"];
  require(re.is_array() && im.is_array() && static_cast<int>(re.size()) == rows &&
              static_cast<int>(im.size()) == rows,
          ErrorKind::InvalidInput, "matrix parts must have 'rows' rows");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    require(re[i].is_array() && im[i].is_array() && static_cast<int>(re[i].size()) == cols &&
                static_cast<int>(im[i].size()) == cols,
            ErrorKind::InvalidInput, "matrix row length mismatch");
    for (int c = 0; c < cols; ++c) {
      require(re[i][c].is_number() && im[i][c].is_number(), ErrorKind::InvalidInput,
              "matrix entries must be numbers");
      m(i, c) = Complex(re[i][c].get<double>(), im[i][c].get<double>());
    }
  }
  require_finite(m, "matrix");
  return m;
}

Json experiment_to_json(const StatisticalExperiment& e) {
  Json states = Json::object();
  for (int t = 0; t < e.num_labels(); ++t) states[e.labels[t]] = matrix_to_json(e.states[t]);
  Json j{{"dim", e.dim}, {"labels", e.labels}, {"states", std::move(states)}};
  if (e.weights) j["weights"] = *e.weights;
  return j;
}

StatisticalExperiment experiment_from_json(const Json& j) {
  require_keys(j, {"dim", "labels", "states"}, {"weights"}, "experiment");
  StatisticalExperiment e;
  require(j["dim"].is_number_integer(), ErrorKind::InvalidInput, "dim must be an integer");
  e.dim = j["dim"].get<int>();
  require(j["labels"].is_array(), ErrorKind::InvalidInput, "labels must be an array");
  for (const auto& l : j["labels"]) {
    require(l.is_string(), ErrorKind::InvalidInput, "labels must be strings");
    e.labels.push_back(l.get<std::string>());
  }
  require(j["states"].is_object(), ErrorKind::InvalidInput, "states must be an object");
  require(j["states"].size() == e.labels.size(), ErrorKind::InvalidInput,
          "states must carry exactly one matrix per label");
  for (const auto& label : e.labels) {
    require(j["states"].contains(label), ErrorKind::InvalidInput,
            "missing state for label '" + label + "'");
    e.states.push_back(matrix_from_json(j["states"][label]));
  }
  if (j.contains("weights")) {
    require(j["weights"].is_array(), ErrorKind::InvalidInput, "weights must be an array");
    std::vector<double> w;
    for (const auto& x : j["weights"]) {
      require(x.is_number(), ErrorKind::InvalidInput, "weights must be numbers");
      w.push_back(x.get<double>());
    }
    e.weights = std::move(w);
  }
  return e;
}

Json channel_to_json(const Superoperator& s) {
  if (!s.kraus.empty()) {
    Json list = Json::array();
    for (const Matrix& k : s.kraus) list.push_back(matrix_to_json(k));
    return Json{{"kraus", std::move(list)}};
  }
  return Json{{"in_dim", s.in_dim}, {"out_dim", s.out_dim}, {"choi", matrix_to_json(s.choi)}};
}

Superoperator channel_from_json(const Json& j) {
  require(j.is_object(), ErrorKind::InvalidInput, "channel must be a JSON object");
  if (j.contains("kraus")) {
    require_keys(j, {"kraus"}, {"in_dim", "out_dim"}, "channel");
    std::vector<Matrix> ops;
    for (const auto& k : j["kraus"]) ops.push_back(matrix_from_json(k));
    Superoperator s = Superoperator::from_kraus(std::move(ops));
    if (j.contains("in_dim"))
      require(j["in_dim"].get<int>() == s.in_dim, ErrorKind::InvalidInput,
              "in_dim inconsistent with Kraus shapes");
    if (j.contains("out_dim"))
      require(j["out_dim"].get<int>() == s.out_dim, ErrorKind::InvalidInput,
              "out_dim inconsistent with Kraus shapes");
    return s;
  }
  require_keys(j, {"in_dim", "out_dim", "choi"}, {}, "channel");
  return Superoperator::from_choi(j["in_dim"].get<int>(), j["out_dim"].get<int>(),
                                  matrix_from_json(j["choi"]));
}

Json decomposition_to_json(const KIDecomposition& k) {
  Json blocks = Json::array();
  for (const Block& blk : k.blocks) {
    Json q = Json::object();
    Json rho = Json::object();
    Json flags = Json::array();
    for (std::size_t t = 0; t < k.labels.size(); ++t) {
      q[k.labels[t]] = blk.q[t];
      rho[k.labels[t]] = matrix_to_json(blk.rho_theta[t]);
      if (blk.q_zero[t]) flags.push_back(k.labels[t]);
    }
    blocks.push_back(Json{{"P", matrix_to_json(blk.projection.matrix)},
                          {"U", matrix_to_json(blk.unitary)},
                          {"n", blk.n},
                          {"m", blk.m},
                          {"sigma", matrix_to_json(blk.sigma)},
                          {"q", std::move(q)},
                          {"rho", std::move(rho)},
                          {"q_zero_flags", std::move(flags)}});
  }
  return Json{{"support_isometry", matrix_to_json(k.support_isometry)},
              {"source_dim", k.source_dim},
              {"labels", k.labels},
              {"blocks", std::move(blocks)}};
}

KIDecomposition decomposition_from_json(const Json& j) {
  require_keys(j, {"support_isometry", "source_dim", "labels", "blocks"}, {}, "decomposition");
  KIDecomposition k;
  k.support_isometry = matrix_from_json(j["support_isometry"]);
  k.source_dim = j["source_dim"].get<int>();
  for (const auto& l : j["labels"]) k.labels.push_back(l.get<std::string>());
  for (const auto& bj : j["blocks"]) {
    require_keys(bj, {"P", "U", "n", "m", "sigma", "q", "rho", "q_zero_flags"}, {}, "block");
    Block blk;
    blk.projection.matrix = matrix_from_json(bj["P"]);
    blk.n = bj["n"].get<int>();
    blk.m = bj["m"].get<int>();
    blk.projection.rank =
        static_cast<int>(std::lround(blk.projection.matrix.trace().real()));
    blk.unitary = matrix_from_json(bj["U"]);
    blk.sigma = matrix_from_json(bj["sigma"]);
    std::set<std::string> flagged;
    for (const auto& fl : bj["q_zero_flags"]) flagged.insert(fl.get<std::string>());
    for (const auto& label : k.labels) {
      require(bj["q"].contains(label) && bj["rho"].contains(label), ErrorKind::InvalidInput,
              "block misses data for label '" + label + "'");
      blk.q.push_back(bj["q"][label].get<double>());
      blk.rho_theta.push_back(matrix_from_json(bj["rho"][label]));
      blk.q_zero.push_back(flagged.count(label) > 0);
    }
    k.blocks.push_back(std::move(blk));
  }
  return k;
}

Json classical_to_json(const ClassicalExperiment& c) {
  Json dist = Json::object();
  for (const auto& [label, q] : c.distributions) dist[label] = q;
  return Json{{"index", c.index_labels}, {"distributions", std::move(dist)}};
}

Json product_report_to_json(const ProductReport& r) {
  auto dims = [](const std::vector<std::pair<int, int>>& v) {
    Json out = Json::array();
    for (const auto& [n, m] : v) out.push_back(Json::array({n, m}));
    return out;
  };
  return Json{{"left_dims", dims(r.left_dims)},
              {"right_dims", dims(r.right_dims)},
              {"product_dims", dims(r.product_dims)},
              {"matched", r.matched},
              {"q_factorization_residual", r.q_factorization_residual},
              {"minimal_sufficiency_checks",
               Json::array({r.minimal_sufficiency_checks.left, r.minimal_sufficiency_checks.right,
                            r.minimal_sufficiency_checks.product})}};
}

Json ki_verify_report_to_json(const KIVerifyReport& r) {
  Json items = Json::array();
  for (const auto& it : r.items)
    items.push_back(Json{{"name", it.name},
                         {"value", it.value},
                         {"threshold", it.threshold},
                         {"pass", it.pass}});
  return Json{{"items", std::move(items)}, {"pass", r.pass()}};
}

Json ground_truth_to_json(const PlantedGroundTruth& t,
                          const std::vector<std::string>& labels) {
  Json dims = Json::array();
  for (const auto& [n, m] : t.block_dims) dims.push_back(Json::array({n, m}));
  Json sigmas = Json::array();
  for (const Matrix& s : t.planted_sigmas) sigmas.push_back(matrix_to_json(s));
  Json q = Json::object();
  Json rho = Json::object();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    q[labels[l]] = t.planted_q[l];
    Json rlist = Json::array();
    for (const Matrix& r : t.planted_rho[l]) rlist.push_back(matrix_to_json(r));
    rho[labels[l]] = std::move(rlist);
  }
  return Json{{"block_dims", std::move(dims)},
              {"unitary", matrix_to_json(t.planted_unitary)},
              {"sigmas", std::move(sigmas)},
              {"q", std::move(q)},
              {"rho", std::move(rho)}};
}

}  // namespace kid
