#pragma once

// Independent oracles used by the tests only.  The qubit oracle works on the
// 2x2 density matrix with explicit complex amplitudes; the rational oracle
// decides noncontextual-model existence for an orbit fragment by exact
// arithmetic and an explicit constructive model.  Neither shares code with
// the library paths they check.

#include <Eigen/Dense>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>

#include "dualrail/ontic.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

/// Dual-rail qubit with amplitudes sqrt(r) on |R> and e^{i phi} sqrt(1-r) on
/// |L>; basis order (|L>, |R>).
struct DualRailState {
    Complex amp_left;
    Complex amp_right;

    static DualRailState from_settings(double r, double phi, bool swap = false) {
        DualRailState s;
        s.amp_right = std::sqrt(r);
        s.amp_left = std::polar(std::sqrt(1.0 - r), phi);
        if (swap) std::swap(s.amp_left, s.amp_right);
        return s;
    }

    Eigen::Matrix2cd density() const {
        Eigen::Vector2cd psi;
        psi << amp_left, amp_right;
        return psi * psi.adjoint();
    }

    double expect_z() const {
        const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
        return (z * density()).trace().real();
    }

    double expect_x() const {
        const Eigen::Matrix2cd x = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
        return (x * density()).trace().real();
    }

    double prob_left() const { return std::norm(amp_left); }

    double prob_phase_plus() const {
        // |<+|psi>|^2 with |+> = (|L> + |R>)/sqrt(2).
        return std::norm((amp_left + amp_right) / std::sqrt(2.0));
    }
};

/// Exact sign test for the orbit fragment: a noncontextual model exists iff
/// |a| + |b| <= 1, decided in rational arithmetic on the exact dyadic values
/// of the doubles.
inline bool rational_orbit_feasible(double a, double b) {
    Rational ra(a), rb(b);
    if (ra < 0) ra = -ra;
    if (rb < 0) rb = -rb;
    return ra + rb <= 1;
}

/// Explicit model for |a| + |b| <= 1, built from the deterministic extremal
/// distributions: mu_i = |a| w_M(sign) + |b| w_M'(sign) + (1-|a|-|b|) u.
/// Assembled and normalized in exact arithmetic, then rounded to doubles.
inline dualrail::OnticModel rational_orbit_model(double a, double b) {
    Rational ra(a), rb(b);
    const int sa = ra < 0 ? -1 : 1;
    const int sb = rb < 0 ? -1 : 1;
    if (ra < 0) ra = -ra;
    if (rb < 0) rb = -rb;
    const Rational rest = Rational(1) - ra - rb;
    if (rest < 0) throw std::logic_error("rational_orbit_model: infeasible input");

    // Lambda order (+,+), (+,-), (-,+), (-,-) for (M, M').
    auto w_m = [](int sign) {
        return sign > 0 ? std::array<Rational, 4>{Rational(1, 2), Rational(1, 2), 0, 0}
                        : std::array<Rational, 4>{0, 0, Rational(1, 2), Rational(1, 2)};
    };
    auto w_mp = [](int sign) {
        return sign > 0 ? std::array<Rational, 4>{Rational(1, 2), 0, Rational(1, 2), 0}
                        : std::array<Rational, 4>{0, Rational(1, 2), 0, Rational(1, 2)};
    };
    const std::array<Rational, 4> uniform = {Rational(1, 4), Rational(1, 4), Rational(1, 4),
                                             Rational(1, 4)};

    // Sign pattern of the four preparations: (s, s, -s, -s) for M and
    // (t, -t, -t, t) for M'.
    const std::array<std::pair<int, int>, 4> signs = {
        {{sa, sb}, {sa, -sb}, {-sa, -sb}, {-sa, sb}}};

    dualrail::OnticModel model;
    model.lambda_labels = {"++", "+-", "-+", "--"};
    model.effect_labels = {"M+", "M-", "M'+", "M'-"};
    model.mu.resize(4, 4);
    model.xi.resize(4, 4);
    const int m_sign[4] = {1, 1, -1, -1};
    const int mp_sign[4] = {1, -1, 1, -1};
    for (int l = 0; l < 4; ++l) {
        model.xi(0, l) = m_sign[l] > 0 ? 1.0 : 0.0;
        model.xi(1, l) = m_sign[l] > 0 ? 0.0 : 1.0;
        model.xi(2, l) = mp_sign[l] > 0 ? 1.0 : 0.0;
        model.xi(3, l) = mp_sign[l] > 0 ? 0.0 : 1.0;
    }
    for (int i = 0; i < 4; ++i) {
        const auto wm = w_m(signs[i].first);
        const auto wmp = w_mp(signs[i].second);
        for (int l = 0; l < 4; ++l) {
            const Rational value = ra * wm[l] + rb * wmp[l] + rest * uniform[l];
            model.mu(i, l) = static_cast<double>(value);
        }
    }
    return model;
}

}  // namespace oracle
