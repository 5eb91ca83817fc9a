#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualrail/errors.hpp"

namespace dualrail {

/// Operational states and effects are real vectors paired by a dot product.
/// Coordinate 0 is the unit component: states have coords[0] == 1, the unit
/// effect is (1, 0, ..., 0).  The plane fragment uses (1, x, z) with
/// x = <X> and z = <Z>; the full qubit uses (1, x, y, z).
struct GptVector {
    enum class Kind { state, effect };

    Kind kind = Kind::state;
    Eigen::VectorXd coords;

    int dim() const { return static_cast<int>(coords.size()); }
    bool is_state() const { return kind == Kind::state; }
    bool is_effect() const { return kind == Kind::effect; }
};

GptVector make_state(Eigen::VectorXd coords);
GptVector make_effect(Eigen::VectorXd coords);

/// Plane-fragment state (1, x, z).
GptVector plane_state(double x, double z);
/// Full-qubit state (1, x, y, z).
GptVector qubit_state(double x, double y, double z);
/// Maximally mixed state in dimension d (unit coordinate only).
GptVector mixed_state(int dim);
/// The unit effect (1, 0, ..., 0) in dimension d.
GptVector unit_effect(int dim);

/// Two-outcome measurement; outcomes are labelled +1 and -1.
/// Invariant: plus_effect + minus_effect equals the unit effect.
struct BinaryMeasurement {
    GptVector plus_effect;
    GptVector minus_effect;
    std::string label;

    int dim() const { return plus_effect.dim(); }
};

/// Builds the measurement with plus effect (1 + g.s)/2 for the linear
/// functional g on the non-unit coordinates.
BinaryMeasurement measurement_from_direction(const Eigen::VectorXd& direction,
                                             const std::string& label);

void validate_measurement(const BinaryMeasurement& m, double tol = 1e-9);

/// Convex body of valid states over the non-unit coordinates.
///
/// disc/square/diamond are the L2/Linf/L1 unit balls in any embedding
/// dimension (disc at d=4 is the Bloch ball).  regular_polygon and polytope
/// are planar bodies over exactly two non-unit coordinates, stored as the
/// CCW vertex hull in the (x, z) plane.
class StateSpaceModel {
  public:
    enum class Shape { disc, square, diamond, regular_polygon, polytope };

    static StateSpaceModel disc(int dim = 3);
    static StateSpaceModel square(int dim = 3);
    static StateSpaceModel diamond(int dim = 3);
    static StateSpaceModel regular_polygon(int sides);
    static StateSpaceModel polytope(std::vector<Eigen::Vector2d> vertices);

    Shape shape() const { return shape_; }
    int dim() const { return dim_; }
    const std::string& label() const { return label_; }
    /// Hull vertices for polygonal bodies; empty for ball bodies.
    const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
    bool is_planar_polytope() const {
        return shape_ == Shape::regular_polygon || shape_ == Shape::polytope;
    }

  private:
    StateSpaceModel() = default;

    Shape shape_ = Shape::disc;
    int dim_ = 3;
    std::string label_;
    std::vector<Eigen::Vector2d> vertices_;
};

/// P(outcome) = s . e.  Throws ProbabilityOutOfRange if the pairing leaves
/// [0,1] beyond tol; no clamping.
double probability(const GptVector& s, const GptVector& e, double tol = 1e-9);

/// <M> = P(+1) - P(-1), in [-1, 1].
double expectation(const GptVector& s, const BinaryMeasurement& m, double tol = 1e-9);

/// |<M>|; 0 for a uniform outcome distribution, 1 for a deterministic one.
double predictability(const GptVector& s, const BinaryMeasurement& m, double tol = 1e-9);

/// Convex combination of states; weights must be nonnegative and sum to 1
/// within 1e-12.  The unit coordinate of the result is set to exactly 1.
GptVector mix(const std::vector<GptVector>& states, const Eigen::VectorXd& weights);

/// Membership of a state's non-unit coordinates in the body, within tol.
bool contains(const StateSpaceModel& space, const GptVector& s, double tol = 1e-9);

/// Point on the body's boundary in the (x, z) plane at angle theta from +x.
/// Planar bodies only (dim 3, or ball bodies queried in their first two
/// non-unit coordinates).
Eigen::Vector2d boundary_point(const StateSpaceModel& space, double theta);

/// [min, max] of e . s over all states of the body.
std::pair<double, double> effect_range(const StateSpaceModel& space, const GptVector& e);

/// Largest |x| over states of the body with z = value (either sign of the
/// slice coordinate is the caller's choice).  Empty if the slice misses the
/// body entirely.
std::optional<double> slice_max_abs_x(const StateSpaceModel& space, double z);

/// Andrew monotone chain; returns the CCW hull of the input points.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> points);

void to_json(nlohmann::json& j, const GptVector& v);
void from_json(const nlohmann::json& j, GptVector& v);
void to_json(nlohmann::json& j, const BinaryMeasurement& m);
void from_json(const nlohmann::json& j, BinaryMeasurement& m);

}  // namespace dualrail
