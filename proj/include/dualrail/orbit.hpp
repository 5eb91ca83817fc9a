#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <tuple>
#include <vector>

#include "dualrail/orbit_types.hpp"

namespace dualrail {

/// Result of testing the two orbit conditions.  symmetry_residual is the
/// worst violation over the six sign-pattern equalities
///   <M>1 = <M>2 = -<M>3 = -<M>4,  <M'>1 = -<M'>2 = -<M'>3 = <M'>4
/// (minimized over cyclic relabelings); equivalence_residual is the max-norm
/// of (s1 + s3)/2 - (s2 + s4)/2.
struct OrbitReport {
    double symmetry_residual = 0.0;
    double equivalence_residual = 0.0;
    bool pass = false;
    double tol = 0.0;
    // Cyclic shift applied to (s1,s2,s3,s4) for the best sign-pattern match.
    int assignment_shift = 0;
};

OrbitReport check_orbit(const OrbitQuadruple& q, double tol);

/// Completes s1 to a full orbit by reflecting its (<M>, <M'>) values through
/// the four sign sectors, adjusting only the coordinates spanned by the two
/// measurement functionals.  Present iff all three counterparts lie in the
/// space.  Throws NotAPlaneFragment if the functionals are linearly
/// dependent on the non-unit coordinates.
std::optional<std::array<GptVector, 3>> complete_orbit(const GptVector& s1,
                                                       const BinaryMeasurement& m,
                                                       const BinaryMeasurement& m_prime,
                                                       const StateSpaceModel& space,
                                                       double tol = 1e-9);

struct SymmetryScanResult {
    bool symmetric = true;
    std::vector<GptVector> counterexamples;
};

/// Sweeps boundary and interior states of a planar body on a grid and tests
/// orbit completion for each.  Returns the failing states, if any, in
/// deterministic scan order.
SymmetryScanResult symmetry_scan(const StateSpaceModel& space, const BinaryMeasurement& m,
                                 const BinaryMeasurement& m_prime, int grid);

void to_json(nlohmann::json& j, const OrbitReport& r);
void to_json(nlohmann::json& j, const OrbitQuadruple& q);
void from_json(const nlohmann::json& j, OrbitQuadruple& q);

}  // namespace dualrail
