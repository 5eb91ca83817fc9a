#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

#include "dualrail/duality.hpp"
#include "dualrail/ontic.hpp"
#include "dualrail/orbit.hpp"

namespace dualrail {

/// Orbit quadruple assembled from convex mixtures of realized states.
/// weights is 4 x n, row-stochastic: secondary state k is
/// sum_j weights(k, j) * realized[j].
struct SecondaryQuadruple {
    Eigen::MatrixXd weights;
    OrbitQuadruple quadruple;
    double witness = 0.0;   // V + P of the quadruple
    double nc_margin = 0.0; // 1 - witness
};

/// Finds row-stochastic mixtures of the realized states whose four mixtures
/// satisfy the orbit sign pattern and the equal-mixture equivalence exactly,
/// maximizing <M>-predictability + <M'>-predictability.  The sign sector of
/// the first secondary state is not known in advance, so all four sectors
/// are solved and the best kept.  Throws InfeasibleOrbit when the hull
/// admits no orbit (degenerate hulls only).
SecondaryQuadruple find_secondary_quadruple(const std::vector<GptVector>& realized,
                                            const BinaryMeasurement& m,
                                            const BinaryMeasurement& m_prime, double tol = 1e-9);

struct WitnessReport {
    double visibility = 0.0;
    double distinguishability = 0.0;
    double witness = 0.0;
    double nc_margin = 0.0;       // 1 - (V + P)
    double quantum_margin = 0.0;  // 1 - (V^2 + P^2)
    OrbitReport orbit;
    FeasibilityResult feasibility;
    // The feasibility verdict must match the sign of the violation outside
    // the tolerance band.
    bool consistent = false;
};

/// Evaluates the witness, both bounds, the orbit residuals and the
/// noncontextual-model feasibility verdict for a secondary quadruple.
/// Predictabilities are taken against the quadruple's own (realized)
/// measurements M and M'.
WitnessReport witness_report(const SecondaryQuadruple& q, double tol = 1e-9);

void to_json(nlohmann::json& j, const SecondaryQuadruple& q);
void to_json(nlohmann::json& j, const WitnessReport& r);

}  // namespace dualrail
