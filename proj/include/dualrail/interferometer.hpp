#pragma once

#include <cstdint>

#include "dualrail/gpt.hpp"
#include "dualrail/orbit_types.hpp"

namespace dualrail {

/// Preparation-stage hardware settings: a beamsplitter of reflectivity r, a
/// phase shifter on the left arm, and an optional mode swap after the
/// beamsplitter (which simulates the reflectivity-(1-r) beamsplitter).
struct PrepSettings {
    double reflectivity = 0.5;
    double phase = 0.0;  // radians, normalized to [0, 2*pi)
    bool swap_after = false;
};

PrepSettings make_settings(double reflectivity, double phase, bool swap_after = false);

/// Depolarizing noise on states (non-unit coordinates shrink by 1-p) and a
/// uniform-coin bias on effects (e -> (1-eps)e + eps*unit/2).
struct NoiseModel {
    double depolarizing = 0.0;
    double effect_bias = 0.0;
};

NoiseModel make_noise(double depolarizing, double effect_bias = 0.0);

/// State of the dual-rail qubit leaving the preparation stage, as the full
/// qubit vector (1, x, y, z):
///   z = 1 - 2r,  x = 2*sqrt(r(1-r))*cos(phi),  y = 2*sqrt(r(1-r))*sin(phi),
/// with the swap flipping z.
GptVector prepare(const PrepSettings& settings);

/// Drops the y coordinate of a qubit state (1, x, y, z) -> (1, x, z).
/// Requires |y| <= tol.
GptVector to_plane(const GptVector& s, double tol = 1e-9);

/// Which-way measurement: +1 on detecting the left mode; <M> = <Z>.
BinaryMeasurement which_way(int dim = 4);

/// Which-phase measurement: +1 on the left output port of the recombining
/// 50-50 beamsplitter; <M> = <X>.
BinaryMeasurement which_phase(int dim = 4);

/// The four preparations {(r,0), (r,pi), (r,pi)+swap, (r,0)+swap} together
/// with the which-way and which-phase measurements.  By construction they
/// satisfy the reflection-orbit conditions exactly for every r.
OrbitQuadruple orbit_preparations(double reflectivity);

GptVector apply_noise(const GptVector& target, const NoiseModel& noise);
BinaryMeasurement apply_noise(const BinaryMeasurement& m, const NoiseModel& noise);
OrbitQuadruple apply_noise(const OrbitQuadruple& q, const NoiseModel& noise);

}  // namespace dualrail
