#include "dualrail/duality.hpp"

#include <algorithm>
#include <cmath>

#include "dualrail/interferometer.hpp"

namespace dualrail {

namespace {

constexpr double kBoundTol = 1e-12;

}  // namespace

double fringe_visibility(const GptVector& s) {
    const BinaryMeasurement m = which_phase(s.dim());
    const double p_plus = probability(s, m.plus_effect);
    const double p_minus = probability(s, m.minus_effect);
    const double simple = std::abs(p_plus - p_minus);
    const double raw = fringe_visibility_raw(s);
    if (std::abs(simple - raw) > 1e-12) {
        throw ProbabilityOutOfRange("which-phase probabilities do not sum to one");
    }
    return simple;
}

double fringe_visibility_raw(const GptVector& s) {
    const BinaryMeasurement m = which_phase(s.dim());
    const double p_plus = probability(s, m.plus_effect);
    const double p_minus = probability(s, m.minus_effect);
    const double hi = std::max(p_plus, p_minus);
    const double lo = std::min(p_plus, p_minus);
    return (hi - lo) / (hi + lo);
}

double path_distinguishability(const GptVector& s) {
    return predictability(s, which_way(s.dim()));
}

DualityPoint duality_point(const GptVector& s, std::optional<std::string> prep_id) {
    return DualityPoint{fringe_visibility(s), path_distinguishability(s), std::move(prep_id)};
}

BoundCheck nc_bound_satisfied(const DualityPoint& pt) {
    const double margin = 1.0 - (pt.visibility + pt.distinguishability);
    return BoundCheck{margin >= -kBoundTol, margin};
}

BoundCheck quantum_bound_satisfied(const DualityPoint& pt) {
    const double margin =
        1.0 - (pt.visibility * pt.visibility + pt.distinguishability * pt.distinguishability);
    return BoundCheck{margin >= -kBoundTol, margin};
}

TradeoffCurve tradeoff_sweep(const StateSpaceModel& space, int grid) {
    if (grid < 2) throw ValidationError("tradeoff_sweep: grid must be >= 2");
    TradeoffCurve curve;
    curve.space_label = space.label();
    curve.points.reserve(grid);
    for (int k = 0; k < grid; ++k) {
        const double p = static_cast<double>(k) / (grid - 1);
        double best = -1.0;
        for (const double z : {p, -p}) {
            if (const auto v = slice_max_abs_x(space, z)) best = std::max(best, *v);
        }
        if (best < 0.0) {
            throw EmptySlice("no state attains distinguishability " + std::to_string(p) +
                             " in " + space.label());
        }
        curve.points.push_back(DualityPoint{best, p, std::nullopt});
    }
    return curve;
}

double witness_sum_at(double reflectivity) {
    const double r = reflectivity;
    return 2.0 * std::sqrt(r * (1.0 - r)) + std::abs(1.0 - 2.0 * r);
}

ReflectivityOptimum optimal_reflectivity(WitnessObjective) {
    constexpr int kGrid = 20001;
    constexpr double kMergeTol = 1e-9;

    // Dense scan.
    double best = -1.0;
    std::vector<double> seeds;
    for (int k = 0; k < kGrid; ++k) {
        const double r = static_cast<double>(k) / (kGrid - 1);
        const double v = witness_sum_at(r);
        if (v > best + kMergeTol) {
            best = v;
            seeds.assign(1, r);
        } else if (v > best - kMergeTol) {
            seeds.push_back(r);
        }
    }

    // Golden-section refinement around each candidate cluster.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const double step = 1.0 / (kGrid - 1);
    std::vector<double> maximizers;
    double value = -1.0;
    for (double seed : seeds) {
        double lo = std::max(0.0, seed - 2.0 * step);
        double hi = std::min(1.0, seed + 2.0 * step);
        double c = hi - gr * (hi - lo);
        double d = lo + gr * (hi - lo);
        double fc = witness_sum_at(c), fd = witness_sum_at(d);
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            if (fc > fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - gr * (hi - lo);
                fc = witness_sum_at(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + gr * (hi - lo);
                fd = witness_sum_at(d);
            }
        }
        const double r = 0.5 * (lo + hi);
        const double v = witness_sum_at(r);
        if (v > value + kMergeTol) {
            value = v;
            maximizers.assign(1, r);
        } else if (v > value - kMergeTol) {
            bool duplicate = false;
            for (double m : maximizers) duplicate |= std::abs(m - r) < 1e-6;
            if (!duplicate) maximizers.push_back(r);
        }
    }
    std::sort(maximizers.begin(), maximizers.end());
    return ReflectivityOptimum{std::move(maximizers), value};
}

}  // namespace dualrail
