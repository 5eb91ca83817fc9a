#pragma once

#include <array>

#include "dualrail/gpt.hpp"

namespace dualrail {

/// Candidate reflection orbit: four states and two binary measurements.
/// Validity (the equal-predictability sign pattern and the equal-mixture
/// equivalence) is decided by check_orbit, not by construction.
struct OrbitQuadruple {
    std::array<GptVector, 4> states;
    BinaryMeasurement m;
    BinaryMeasurement m_prime;

    int dim() const { return states[0].dim(); }
};

}  // namespace dualrail
