#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

#include "dualrail/orbit_types.hpp"

namespace dualrail {

/// Finite ontological model: distributions mu(lambda | prep) and response
/// functions xi(outcome | measurement, lambda) reproducing the operational
/// probabilities of an orbit quadruple.
struct OnticModel {
    std::vector<std::string> lambda_labels;
    // 4 x |Lambda|: one distribution per preparation.
    Eigen::MatrixXd mu;
    // 4 x |Lambda|: response rows ordered [M+, M-, M'+, M'-].
    Eigen::MatrixXd xi;
    std::vector<std::string> effect_labels;
};

struct InfeasibilityCertificate {
    // One multiplier per LP row; contracts the constraint system to an
    // impossibility: dual.b exceeds what any point of the unit box can reach.
    Eigen::VectorXd dual;
    double violation = 0.0;
    std::string description;
};

struct FeasibilityResult {
    bool feasible = false;
    std::optional<OnticModel> model;
    std::optional<InfeasibilityCertificate> certificate;
    double tol = 0.0;
    // Set when the verdict came from the exact rational re-solve.
    bool resolved_exactly = false;
};

struct NcOptions {
    // Copies of the deterministic ontic space; feasibility must not depend on
    // this (see note below), and tests compare 1, 2 and 4 copies.
    int lambda_copies = 1;
};

/// Decides whether the quadruple admits a preparation-noncontextual
/// ontological model, by linear-program feasibility over distributions on
/// the joint value assignments to (M, M').
///
/// The ontic space is fixed to the four deterministic assignments.  For two
/// binary measurements constrained only by preparation-side equivalences this
/// loses no generality: every response function is a convex mixture of the
/// deterministic assignments, and the mixture weights can be absorbed into
/// the state distributions.  The lambda_copies option exists to probe this
/// reduction empirically.
///
/// Constraints: each mu_i is a distribution; each mu_i reproduces <M> and
/// <M'> of state i under the deterministic responses; and
/// mu_1 + mu_3 = mu_2 + mu_4 componentwise (the ontological image of the
/// equal-mixture equivalence).
///
/// Verdicts whose float margin is within ~1000*tol of the boundary are
/// re-solved in exact rational arithmetic on the same LP data.
FeasibilityResult nc_model_feasibility(const OrbitQuadruple& q, double tol = 1e-9,
                                       const NcOptions& options = {});

/// Re-checks every model invariant (normalization, response-function range
/// and completeness, reproduction of the operational probabilities)
/// independently of the solver.
bool verify_model(const OnticModel& model, const OrbitQuadruple& q, double tol);

/// Evaluates the certificate against the constraint system; returns the
/// contradiction margin (positive means the certificate is valid).
double verify_certificate(const InfeasibilityCertificate& cert, const OrbitQuadruple& q,
                          int lambda_copies = 1);

struct BoundaryPoint {
    double parameter = 0.0;
    bool feasible = false;
};

struct BoundarySweep {
    std::vector<BoundaryPoint> points;
    // Midpoints of adjacent grid cells where the verdict flips.
    std::vector<double> transitions;
};

/// Feasibility along a depolarizing-noise grid p in [0,1] at fixed
/// reflectivity.
BoundarySweep sweep_noise_boundary(double reflectivity, int grid, double tol = 1e-9);

/// Feasibility along a reflectivity grid r in [0,1] at fixed depolarizing
/// noise.
BoundarySweep sweep_reflectivity_boundary(double depolarizing, int grid, double tol = 1e-9);

void to_json(nlohmann::json& j, const OnticModel& m);
void to_json(nlohmann::json& j, const FeasibilityResult& r);
void to_json(nlohmann::json& j, const BoundarySweep& s);

}  // namespace dualrail
