#include "dualrail/interferometer.hpp"

#include <cmath>
#include <numbers>

namespace dualrail {

PrepSettings make_settings(double reflectivity, double phase, bool swap_after) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw ValidationError("reflectivity must lie in [0,1]");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phase = std::fmod(phase, two_pi);
    if (phase < 0.0) phase += two_pi;
    return PrepSettings{reflectivity, phase, swap_after};
}

NoiseModel make_noise(double depolarizing, double effect_bias) {
    if (!(depolarizing >= 0.0 && depolarizing <= 1.0) ||
        !(effect_bias >= 0.0 && effect_bias <= 1.0)) {
        throw ValidationError("noise parameters must lie in [0,1]");
    }
    return NoiseModel{depolarizing, effect_bias};
}

GptVector prepare(const PrepSettings& settings) {
    const double r = settings.reflectivity;
    const double amp = 2.0 * std::sqrt(r * (1.0 - r));
    double z = 1.0 - 2.0 * r;
    const double x = amp * std::cos(settings.phase);
    const double y = amp * std::sin(settings.phase);
    if (settings.swap_after) z = -z;
    return qubit_state(x, y, z);
}

GptVector to_plane(const GptVector& s, double tol) {
    if (!s.is_state() || s.dim() != 4) {
        throw DimensionMismatch("to_plane expects a qubit state (1, x, y, z)");
    }
    if (std::abs(s.coords[2]) > tol) {
        throw ValidationError("to_plane: state leaves the x-z plane");
    }
    return plane_state(s.coords[1], s.coords[3]);
}

BinaryMeasurement which_way(int dim) {
    if (dim != 3 && dim != 4) throw DimensionMismatch("which_way: dim must be 3 or 4");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim - 1);
    g[dim - 2] = 1.0;  // z is the last coordinate in both conventions
    return measurement_from_direction(g, "Z");
}

BinaryMeasurement which_phase(int dim) {
    if (dim != 3 && dim != 4) throw DimensionMismatch("which_phase: dim must be 3 or 4");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim - 1);
    g[0] = 1.0;
    return measurement_from_direction(g, "X");
}

OrbitQuadruple orbit_preparations(double reflectivity) {
    const double pi = std::numbers::pi;
    return OrbitQuadruple{
        {
            prepare(make_settings(reflectivity, 0.0, false)),
            prepare(make_settings(reflectivity, pi, false)),
            prepare(make_settings(reflectivity, pi, true)),
            prepare(make_settings(reflectivity, 0.0, true)),
        },
        which_way(4),
        which_phase(4),
    };
}

GptVector apply_noise(const GptVector& target, const NoiseModel& noise) {
    GptVector out = target;
    if (target.is_state()) {
        out.coords.tail(out.dim() - 1) *= 1.0 - noise.depolarizing;
        out.coords[0] = 1.0;
    } else if (target.is_effect()) {
        Eigen::VectorXd half_unit = Eigen::VectorXd::Zero(out.dim());
        half_unit[0] = 0.5;
        out.coords = (1.0 - noise.effect_bias) * out.coords + noise.effect_bias * half_unit;
    } else {
        throw KindMismatch("apply_noise: unknown vector kind");
    }
    return out;
}

BinaryMeasurement apply_noise(const BinaryMeasurement& m, const NoiseModel& noise) {
    return BinaryMeasurement{apply_noise(m.plus_effect, noise),
                             apply_noise(m.minus_effect, noise), m.label};
}

OrbitQuadruple apply_noise(const OrbitQuadruple& q, const NoiseModel& noise) {
    return OrbitQuadruple{
        {apply_noise(q.states[0], noise), apply_noise(q.states[1], noise),
         apply_noise(q.states[2], noise), apply_noise(q.states[3], noise)},
        apply_noise(q.m, noise),
        apply_noise(q.m_prime, noise),
    };
}

}  // namespace dualrail
