// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/reference_response.hpp"

namespace sparsewb {

ReferenceResponse build_reference(const SamplingSpec& spec, const TdlConfig& tdl)
{
    spec.validate();
    tdl.validate();
    ReferenceResponse ref;
    ref.frequencies = spec.frequencies();
    ref.angles = spec.angles();
    const auto k_count = static_cast<Index>(ref.frequencies.size());
    const auto l_count = static_cast<Index>(ref.angles.size());
    const double delay = 0.5 * static_cast<double>(tdl.taps - 1);
    ref.values = ComplexVector::Zero(k_count * l_count);
    for (Index k = 0; k < k_count; ++k) {
        const double w = ref.frequencies[static_cast<size_t>(k)];
        const Complex target =
            spec.mainlobe_phase == MainlobePhase::Unit ? Complex{1.0, 0.0} : std::polar(1.0, -w * delay);
        for (Index l = 0; l < l_count; ++l) {
            if (ref.angles[static_cast<size_t>(l)].mainlobe) {
                ref.values[k * l_count + l] = target;
            }
        }
    }
    return ref;
}

}  // namespace sparsewb
