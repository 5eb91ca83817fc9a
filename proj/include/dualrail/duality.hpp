#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualrail/gpt.hpp"

namespace dualrail {

struct DualityPoint {
    double visibility = 0.0;
    double distinguishability = 0.0;
    std::optional<std::string> source_prep;
};

struct TradeoffCurve {
    std::vector<DualityPoint> points;  // distinguishability strictly increasing
    std::string space_label;
};

struct BoundCheck {
    bool satisfied = false;
    double margin = 0.0;
};

/// Fringe visibility |<X>| of a qubit or plane state.  Computed both as the
/// normalized intensity contrast (Pmax - Pmin)/(Pmax + Pmin) of the
/// which-phase probabilities and as |P(+1) - P(-1)|; the two must agree
/// because the two detection probabilities sum to one.
double fringe_visibility(const GptVector& s);
/// The raw contrast form, exposed for cross-checks.
double fringe_visibility_raw(const GptVector& s);

/// Path distinguishability |P(L) - P(R)| = |<Z>|.
double path_distinguishability(const GptVector& s);

DualityPoint duality_point(const GptVector& s, std::optional<std::string> prep_id = {});

/// V + P <= 1; margin = 1 - (V + P), satisfied iff margin >= -1e-12.
BoundCheck nc_bound_satisfied(const DualityPoint& pt);

/// V^2 + P^2 <= 1; margin = 1 - (V^2 + P^2).
BoundCheck quantum_bound_satisfied(const DualityPoint& pt);

/// For each distinguishability on a uniform grid over [0,1], the largest
/// visibility over states of the body with that |z|.  Planar bodies use
/// their boundary directly; no iterative solver involved.
TradeoffCurve tradeoff_sweep(const StateSpaceModel& space, int grid);

enum class WitnessObjective { witness_sum };

struct ReflectivityOptimum {
    std::vector<double> maximizers;  // all global maximizers, ascending
    double value = 0.0;
};

/// Maximizes V(r) + P(r) = 2*sqrt(r(1-r)) + |1-2r| over r in [0,1] by dense
/// grid plus local refinement; returns every global maximizer up to 1e-9.
ReflectivityOptimum optimal_reflectivity(WitnessObjective objective = WitnessObjective::witness_sum);

/// V + P at the plane state reached by reflectivity r with phase 0.
double witness_sum_at(double reflectivity);

}  // namespace dualrail
