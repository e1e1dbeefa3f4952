#pragma once

#include <map>
#include <string>
#include <vector>

#include "kidecomp/channels.hpp"
#include "kidecomp/structure.hpp"

namespace kid {

// The commutative face of a decomposed experiment: one probability vector
// over the block indices per label.
struct ClassicalExperiment {
  std::vector<int> index_labels;
  std::map<std::string, std::vector<double>> distributions;
};

ClassicalExperiment classical_part(const KIDecomposition& k);

// An experiment is broadcastable exactly when every block carries a trivial
// H-side, so the minimal sufficient subalgebra is commutative.
bool is_broadcastable(const KIDecomposition& k);

// Witness channel: in the Schrodinger picture
//   rho -> sum_i trace(P_i rho) s_i (x) s_i
// with s_i the embedded block state. Both marginals reproduce every family
// state. Raises NotClassical when some block has n > 1.
Superoperator broadcast_channel(const KIDecomposition& k);

struct ExtractionInstrument {
  Superoperator pinching;  // rho -> sum_i P_i rho P_i on the source space
  std::map<std::string, std::vector<double>> outcome_map;
};

// Non-disturbing measurement of the classical part: the pinching leaves
// every family state fixed while the outcome statistics are exactly the
// classical-part distributions.
ExtractionInstrument extraction_instrument(const KIDecomposition& k);

}  // namespace kid
