#pragma once

#include <cstdint>
#include <vector>

#include "train_graph.hpp"

namespace lvq {

// Which quantizer the inference path uses. Training always optimizes the
// relaxed rounding objective; Usq and FixedE8 simply freeze the transform at
// identity, and FixedE8 swaps plain rounding for the exact lattice rule when
// producing bitstreams.
enum class QuantizerKind : uint16_t { Usq = 0, FixedE8 = 1, Salvq = 2 };

const char* quantizer_kind_name(QuantizerKind kind);

struct Model {
  QuantizerKind kind = QuantizerKind::Usq;
  TrainState state;
  std::vector<double> lambdas;  // rate weight per target, kept for reporting

  int dim() const { return state.basis.dim; }
  int targets() const { return state.gains.count(); }
};

}  // namespace lvq
