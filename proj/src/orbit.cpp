#include "dualrail/orbit.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

namespace dualrail {

namespace {

// <M> as an affine functional of the non-unit coordinates: offset + g . y.
struct AffineFunctional {
    double offset;
    Eigen::VectorXd gradient;
};

AffineFunctional functional_of(const BinaryMeasurement& m) {
    const Eigen::VectorXd g = m.plus_effect.coords - m.minus_effect.coords;
    return AffineFunctional{g[0], g.tail(g.size() - 1)};
}

}  // namespace

OrbitReport check_orbit(const OrbitQuadruple& q, double tol) {
    if (tol <= 0.0) throw ValidationError("check_orbit: tol must be positive");
    for (const auto& s : q.states) {
        if (s.dim() != q.dim()) throw DimensionMismatch("check_orbit: mixed dimensions");
    }
    if (q.m.dim() != q.dim() || q.m_prime.dim() != q.dim()) {
        throw DimensionMismatch("check_orbit: measurement dimension mismatch");
    }

    std::array<double, 4> a{}, b{};
    for (int i = 0; i < 4; ++i) {
        a[i] = expectation(q.states[i], q.m);
        b[i] = expectation(q.states[i], q.m_prime);
    }

    // Sign pattern of the reference assignment; cyclic shifts are the allowed
    // relabelings.
    OrbitReport report;
    report.tol = tol;
    double best = std::numeric_limits<double>::infinity();
    for (int shift = 0; shift < 4; ++shift) {
        auto at = [&](int k) { return (k + shift) % 4; };
        const double res = std::max({
            std::abs(a[at(0)] - a[at(1)]),
            std::abs(a[at(0)] + a[at(2)]),
            std::abs(a[at(0)] + a[at(3)]),
            std::abs(b[at(0)] + b[at(1)]),
            std::abs(b[at(0)] + b[at(2)]),
            std::abs(b[at(0)] - b[at(3)]),
        });
        if (res < best) {
            best = res;
            report.assignment_shift = shift;
        }
    }
    report.symmetry_residual = best;

    const Eigen::VectorXd gap = 0.5 * (q.states[0].coords + q.states[2].coords) -
                                0.5 * (q.states[1].coords + q.states[3].coords);
    report.equivalence_residual = gap.cwiseAbs().maxCoeff();
    report.pass = report.symmetry_residual <= tol && report.equivalence_residual <= tol;
    return report;
}

std::optional<std::array<GptVector, 3>> complete_orbit(const GptVector& s1,
                                                       const BinaryMeasurement& m,
                                                       const BinaryMeasurement& m_prime,
                                                       const StateSpaceModel& space,
                                                       double tol) {
    if (!s1.is_state()) throw KindMismatch("complete_orbit expects a state");
    if (s1.dim() != space.dim() || m.dim() != s1.dim() || m_prime.dim() != s1.dim()) {
        throw DimensionMismatch("complete_orbit: dimension mismatch");
    }
    const auto f = functional_of(m);
    const auto fp = functional_of(m_prime);
    const int n = s1.dim() - 1;
    Eigen::MatrixXd basis(2, n);
    basis.row(0) = f.gradient.transpose();
    basis.row(1) = fp.gradient.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(1) <= 1e-9 * std::max(1.0, svd.singularValues()(0))) {
        throw NotAPlaneFragment("measurement functionals do not span two directions");
    }

    const Eigen::VectorXd y1 = s1.coords.tail(n);
    const double v_m = f.offset + f.gradient.dot(y1);
    const double v_mp = fp.offset + fp.gradient.dot(y1);

    // Targets follow the reference sign pattern with s1 in its own sector.
    const std::array<Eigen::Vector2d, 3> targets = {
        Eigen::Vector2d{v_m, -v_mp},   // s2
        Eigen::Vector2d{-v_m, -v_mp},  // s3
        Eigen::Vector2d{-v_m, v_mp},   // s4
    };

    // Minimum-norm correction: moves y only within the row span of the two
    // functionals, keeping every other direction fixed.
    const Eigen::Matrix2d gram = basis * basis.transpose();
    const Eigen::Matrix2d gram_inv = gram.inverse();

    std::array<GptVector, 3> out = {s1, s1, s1};
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d delta = targets[k] - Eigen::Vector2d(v_m, v_mp);
        const Eigen::VectorXd y = y1 + basis.transpose() * (gram_inv * delta);
        Eigen::VectorXd coords(s1.dim());
        coords[0] = 1.0;
        coords.tail(n) = y;
        out[k] = GptVector{GptVector::Kind::state, std::move(coords)};
        if (!contains(space, out[k], tol)) return std::nullopt;
    }
    return out;
}

SymmetryScanResult symmetry_scan(const StateSpaceModel& space, const BinaryMeasurement& m,
                                 const BinaryMeasurement& m_prime, int grid) {
    if (grid < 2) throw ValidationError("symmetry_scan: grid must be >= 2");
    if (space.dim() != 3) {
        throw DimensionMismatch("symmetry_scan samples planar bodies (dim 3)");
    }
    SymmetryScanResult result;
    const int radial = std::max(2, grid / 8);
    for (int j = 0; j < grid; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / grid;
        const Eigen::Vector2d edge = boundary_point(space, theta);
        for (int k = radial; k >= 1; --k) {
            const double t = static_cast<double>(k) / radial;
            const GptVector s = plane_state(t * edge.x(), t * edge.y());
            if (!complete_orbit(s, m, m_prime, space)) {
                result.symmetric = false;
                result.counterexamples.push_back(s);
            }
        }
    }
    return result;
}

void to_json(nlohmann::json& j, const OrbitReport& r) {
    j = nlohmann::json{
        {"symmetry_residual", r.symmetry_residual},
        {"equivalence_residual", r.equivalence_residual},
        {"pass", r.pass},
        {"tol", r.tol},
        {"assignment_shift", r.assignment_shift},
    };
}

void to_json(nlohmann::json& j, const OrbitQuadruple& q) {
    j = nlohmann::json{
        {"states", {q.states[0], q.states[1], q.states[2], q.states[3]}},
        {"M", q.m},
        {"Mprime", q.m_prime},
    };
}

void from_json(const nlohmann::json& j, OrbitQuadruple& q) {
    const auto& states = j.at("states");
    if (states.size() != 4) throw ValidationError("orbit quadruple needs exactly 4 states");
    for (int i = 0; i < 4; ++i) q.states[i] = states[i].get<GptVector>();
    q.m = j.at("M").get<BinaryMeasurement>();
    q.m_prime = j.at("Mprime").get<BinaryMeasurement>();
}

}  // namespace dualrail
