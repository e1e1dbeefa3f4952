#pragma once

#include <string>

#include <json.hpp>

#include "kidecomp/channels.hpp"
#include "kidecomp/classical.hpp"
#include "kidecomp/experiment.hpp"
#include "kidecomp/products.hpp"
#include "kidecomp/structure.hpp"

namespace kid {

using Json = nlohmann::json;

// Matrix encoding used repo-wide:
// {"rows": r, "cols": c, "re": [[..]], "im": [[..]]}, row-major IEEE doubles.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// {"dim":.., "labels":[..], "weights":[..]?, "states":{label: matrix}};
// strict: unknown fields are rejected.
Json experiment_to_json(const StatisticalExperiment& e);
StatisticalExperiment experiment_from_json(const Json& j);

// {"in_dim":.., "out_dim":.., "choi": matrix} or {"kraus":[matrix..]}.
Json channel_to_json(const Superoperator& s);
Superoperator channel_from_json(const Json& j);

Json decomposition_to_json(const KIDecomposition& k);
KIDecomposition decomposition_from_json(const Json& j);

Json classical_to_json(const ClassicalExperiment& c);

Json product_report_to_json(const ProductReport& r);

Json ki_verify_report_to_json(const KIVerifyReport& r);

Json ground_truth_to_json(const PlantedGroundTruth& t,
                          const std::vector<std::string>& labels);

Json parse_json(const std::string& text);  // InvalidInput on malformed text

}  // namespace kid
