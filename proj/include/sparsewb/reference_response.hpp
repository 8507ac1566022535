// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"

namespace sparsewb {

/// Desired response over the sampled (omega, theta) grid, in the same column
/// order as SteeringMatrix.
struct ReferenceResponse {
    ComplexVector values;
    std::vector<double> frequencies;
    std::vector<AngleSample> angles;
};

/// Ideal pattern: zero on the sidelobe samples, unit magnitude on the
/// mainlobe samples with the phase given by spec.mainlobe_phase. The TDL
/// length sets the delay of the GroupDelay model.
ReferenceResponse build_reference(const SamplingSpec& spec, const TdlConfig& tdl);

}  // namespace sparsewb
