#include "dualrail/gpt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dualrail {

namespace {

void require_same_dim(const GptVector& a, const GptVector& b, const char* where) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(std::string(where) + ": dimensions " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
}

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

GptVector make_state(Eigen::VectorXd coords) {
    if (coords.size() < 1 || coords[0] != 1.0) {
        throw ValidationError("state must have unit coordinate 1 at index 0");
    }
    return GptVector{GptVector::Kind::state, std::move(coords)};
}

GptVector make_effect(Eigen::VectorXd coords) {
    if (coords.size() < 1) {
        throw ValidationError("effect must be nonempty");
    }
    return GptVector{GptVector::Kind::effect, std::move(coords)};
}

GptVector plane_state(double x, double z) {
    Eigen::VectorXd c(3);
    c << 1.0, x, z;
    return GptVector{GptVector::Kind::state, std::move(c)};
}

GptVector qubit_state(double x, double y, double z) {
    Eigen::VectorXd c(4);
    c << 1.0, x, y, z;
    return GptVector{GptVector::Kind::state, std::move(c)};
}

GptVector mixed_state(int dim) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    c[0] = 1.0;
    return GptVector{GptVector::Kind::state, std::move(c)};
}

GptVector unit_effect(int dim) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    c[0] = 1.0;
    return GptVector{GptVector::Kind::effect, std::move(c)};
}

BinaryMeasurement measurement_from_direction(const Eigen::VectorXd& direction,
                                             const std::string& label) {
    const int dim = static_cast<int>(direction.size()) + 1;
    Eigen::VectorXd plus = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd minus = Eigen::VectorXd::Zero(dim);
    plus[0] = 0.5;
    minus[0] = 0.5;
    plus.tail(dim - 1) = 0.5 * direction;
    minus.tail(dim - 1) = -0.5 * direction;
    return BinaryMeasurement{make_effect(std::move(plus)), make_effect(std::move(minus)), label};
}

void validate_measurement(const BinaryMeasurement& m, double tol) {
    require_same_dim(m.plus_effect, m.minus_effect, "measurement");
    if (!m.plus_effect.is_effect() || !m.minus_effect.is_effect()) {
        throw KindMismatch("measurement outcomes must be effects");
    }
    Eigen::VectorXd sum = m.plus_effect.coords + m.minus_effect.coords;
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(m.dim());
    unit[0] = 1.0;
    if ((sum - unit).cwiseAbs().maxCoeff() > tol) {
        throw ValidationError("measurement outcomes do not sum to the unit effect: " + m.label);
    }
}

StateSpaceModel StateSpaceModel::disc(int dim) {
    StateSpaceModel s;
    s.shape_ = Shape::disc;
    s.dim_ = dim;
    s.label_ = "disc";
    return s;
}

StateSpaceModel StateSpaceModel::square(int dim) {
    StateSpaceModel s;
    s.shape_ = Shape::square;
    s.dim_ = dim;
    s.label_ = "square";
    if (dim == 3) {
        s.vertices_ = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
        s.vertices_ = convex_hull_2d(s.vertices_);
    }
    return s;
}

StateSpaceModel StateSpaceModel::diamond(int dim) {
    StateSpaceModel s;
    s.shape_ = Shape::diamond;
    s.dim_ = dim;
    s.label_ = "diamond";
    if (dim == 3) {
        s.vertices_ = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        s.vertices_ = convex_hull_2d(s.vertices_);
    }
    return s;
}

StateSpaceModel StateSpaceModel::regular_polygon(int sides) {
    if (sides < 3) {
        throw ValidationError("regular polygon needs at least 3 sides");
    }
    StateSpaceModel s;
    s.shape_ = Shape::regular_polygon;
    s.dim_ = 3;
    s.label_ = "ngon" + std::to_string(sides);
    s.vertices_.reserve(sides);
    for (int k = 0; k < sides; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / sides;
        s.vertices_.emplace_back(std::cos(theta), std::sin(theta));
    }
    s.vertices_ = convex_hull_2d(s.vertices_);
    return s;
}

StateSpaceModel StateSpaceModel::polytope(std::vector<Eigen::Vector2d> vertices) {
    if (vertices.size() < 3) {
        throw ValidationError("polytope needs at least 3 vertices");
    }
    StateSpaceModel s;
    s.shape_ = Shape::polytope;
    s.dim_ = 3;
    s.label_ = "polytope";
    s.vertices_ = convex_hull_2d(std::move(vertices));
    if (s.vertices_.size() < 3) {
        throw ValidationError("polytope vertices are collinear");
    }
    // The maximally mixed point must be a valid state.
    bool origin_inside = true;
    const auto& v = s.vertices_;
    for (size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        if (cross2(a, b, Eigen::Vector2d::Zero()) < -1e-12) origin_inside = false;
    }
    if (!origin_inside) {
        throw ValidationError("polytope must contain the maximally mixed point");
    }
    return s;
}

double probability(const GptVector& s, const GptVector& e, double tol) {
    if (!s.is_state() || !e.is_effect()) {
        throw KindMismatch("probability expects (state, effect)");
    }
    require_same_dim(s, e, "probability");
    const double p = s.coords.dot(e.coords);
    if (p < -tol || p > 1.0 + tol) {
        throw ProbabilityOutOfRange("probability " + std::to_string(p) + " outside [0,1]");
    }
    return p;
}

double expectation(const GptVector& s, const BinaryMeasurement& m, double tol) {
    return probability(s, m.plus_effect, tol) - probability(s, m.minus_effect, tol);
}

double predictability(const GptVector& s, const BinaryMeasurement& m, double tol) {
    return std::abs(expectation(s, m, tol));
}

GptVector mix(const std::vector<GptVector>& states, const Eigen::VectorXd& weights) {
    if (states.empty() || static_cast<int>(states.size()) != weights.size()) {
        throw BadWeights("mix: need one weight per state");
    }
    if (weights.minCoeff() < 0.0) {
        throw BadWeights("mix: negative weight");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
        throw BadWeights("mix: weights sum to " + std::to_string(weights.sum()));
    }
    const int dim = states[0].dim();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (size_t i = 0; i < states.size(); ++i) {
        if (!states[i].is_state()) throw KindMismatch("mix expects states");
        require_same_dim(states[i], states[0], "mix");
        acc += weights[static_cast<int>(i)] * states[i].coords;
    }
    acc[0] = 1.0;
    return GptVector{GptVector::Kind::state, std::move(acc)};
}

bool contains(const StateSpaceModel& space, const GptVector& s, double tol) {
    if (s.dim() != space.dim()) {
        throw DimensionMismatch("contains: state dim " + std::to_string(s.dim()) +
                                " vs space dim " + std::to_string(space.dim()));
    }
    const auto y = s.coords.tail(s.dim() - 1);
    switch (space.shape()) {
        case StateSpaceModel::Shape::disc:
            return y.norm() <= 1.0 + tol;
        case StateSpaceModel::Shape::square:
            return y.cwiseAbs().maxCoeff() <= 1.0 + tol;
        case StateSpaceModel::Shape::diamond:
            return y.cwiseAbs().sum() <= 1.0 + tol;
        case StateSpaceModel::Shape::regular_polygon:
        case StateSpaceModel::Shape::polytope: {
            const Eigen::Vector2d p(y[0], y[1]);
            const auto& v = space.vertices();
            for (size_t i = 0; i < v.size(); ++i) {
                const auto& a = v[i];
                const auto& b = v[(i + 1) % v.size()];
                const double len = (b - a).norm();
                if (cross2(a, b, p) < -tol * len) return false;
            }
            return true;
        }
    }
    return false;
}

Eigen::Vector2d boundary_point(const StateSpaceModel& space, double theta) {
    const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
    switch (space.shape()) {
        case StateSpaceModel::Shape::disc:
            return dir;
        case StateSpaceModel::Shape::square: {
            const double m = std::max(std::abs(dir.x()), std::abs(dir.y()));
            return dir / m;
        }
        case StateSpaceModel::Shape::diamond: {
            const double m = std::abs(dir.x()) + std::abs(dir.y());
            return dir / m;
        }
        case StateSpaceModel::Shape::regular_polygon:
        case StateSpaceModel::Shape::polytope: {
            // Ray from the origin; the body contains the origin by invariant.
            const auto& v = space.vertices();
            double best = 0.0;
            for (size_t i = 0; i < v.size(); ++i) {
                const Eigen::Vector2d a = v[i];
                const Eigen::Vector2d e = v[(i + 1) % v.size()] - a;
                const double det = dir.x() * (-e.y()) - dir.y() * (-e.x());
                if (std::abs(det) < 1e-15) continue;
                const double t = (a.x() * (-e.y()) + a.y() * e.x()) / det;
                const double u = (dir.x() * a.y() - dir.y() * a.x()) / det;
                if (t > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::max(best, t);
            }
            return best * dir;
        }
    }
    return dir;
}

std::pair<double, double> effect_range(const StateSpaceModel& space, const GptVector& e) {
    if (!e.is_effect()) throw KindMismatch("effect_range expects an effect");
    if (e.dim() != space.dim()) throw DimensionMismatch("effect_range: dimension mismatch");
    const double c = e.coords[0];
    const auto g = e.coords.tail(e.dim() - 1);
    switch (space.shape()) {
        case StateSpaceModel::Shape::disc: {
            const double r = g.norm();
            return {c - r, c + r};
        }
        case StateSpaceModel::Shape::square: {
            const double r = g.cwiseAbs().sum();
            return {c - r, c + r};
        }
        case StateSpaceModel::Shape::diamond: {
            const double r = g.cwiseAbs().maxCoeff();
            return {c - r, c + r};
        }
        case StateSpaceModel::Shape::regular_polygon:
        case StateSpaceModel::Shape::polytope: {
            double lo = c, hi = c;
            bool first = true;
            for (const auto& v : space.vertices()) {
                const double val = c + g[0] * v.x() + g[1] * v.y();
                if (first) {
                    lo = hi = val;
                    first = false;
                } else {
                    lo = std::min(lo, val);
                    hi = std::max(hi, val);
                }
            }
            return {lo, hi};
        }
    }
    return {c, c};
}

std::optional<double> slice_max_abs_x(const StateSpaceModel& space, double z) {
    switch (space.shape()) {
        case StateSpaceModel::Shape::disc: {
            if (std::abs(z) > 1.0) return std::nullopt;
            return std::sqrt(std::max(0.0, 1.0 - z * z));
        }
        case StateSpaceModel::Shape::square: {
            if (std::abs(z) > 1.0) return std::nullopt;
            return 1.0;
        }
        case StateSpaceModel::Shape::diamond: {
            if (std::abs(z) > 1.0) return std::nullopt;
            return 1.0 - std::abs(z);
        }
        case StateSpaceModel::Shape::regular_polygon:
        case StateSpaceModel::Shape::polytope: {
            const auto& v = space.vertices();
            double best = 0.0;
            bool hit = false;
            for (size_t i = 0; i < v.size(); ++i) {
                const Eigen::Vector2d a = v[i];
                const Eigen::Vector2d b = v[(i + 1) % v.size()];
                if (std::abs(a.y() - z) < 1e-14) {
                    best = std::max(best, std::abs(a.x()));
                    hit = true;
                }
                const double dy = b.y() - a.y();
                if (std::abs(dy) < 1e-15) continue;
                const double t = (z - a.y()) / dy;
                if (t >= 0.0 && t <= 1.0) {
                    best = std::max(best, std::abs(a.x() + t * (b.x() - a.x())));
                    hit = true;
                }
            }
            if (!hit) return std::nullopt;
            return best;
        }
    }
    return std::nullopt;
}

std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> points) {
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const auto& a, const auto& b) {
                                 return (a - b).norm() < 1e-14;
                             }),
                 points.end());
    const size_t n = points.size();
    if (n <= 2) return points;
    std::vector<Eigen::Vector2d> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], points[i]) <= 1e-15) --k;
        hull[k++] = points[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross2(hull[k - 2], hull[k - 1], points[i]) <= 1e-15) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

void to_json(nlohmann::json& j, const GptVector& v) {
    j = nlohmann::json{
        {"kind", v.is_state() ? "state" : "effect"},
        {"coords", std::vector<double>(v.coords.begin(), v.coords.end())},
    };
}

void from_json(const nlohmann::json& j, GptVector& v) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "state" && kind != "effect") {
        throw ValidationError("GptVector kind must be \"state\" or \"effect\"");
    }
    const auto vals = j.at("coords").get<std::vector<double>>();
    Eigen::VectorXd c(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) c[static_cast<int>(i)] = vals[i];
    if (kind == "state") {
        v = make_state(std::move(c));
    } else {
        v = make_effect(std::move(c));
    }
}

void to_json(nlohmann::json& j, const BinaryMeasurement& m) {
    j = nlohmann::json{
        {"label", m.label},
        {"plus", std::vector<double>(m.plus_effect.coords.begin(), m.plus_effect.coords.end())},
        {"minus", std::vector<double>(m.minus_effect.coords.begin(), m.minus_effect.coords.end())},
    };
}

void from_json(const nlohmann::json& j, BinaryMeasurement& m) {
    const auto plus = j.at("plus").get<std::vector<double>>();
    const auto minus = j.at("minus").get<std::vector<double>>();
    Eigen::VectorXd p(static_cast<int>(plus.size()));
    Eigen::VectorXd q(static_cast<int>(minus.size()));
    for (size_t i = 0; i < plus.size(); ++i) p[static_cast<int>(i)] = plus[i];
    for (size_t i = 0; i < minus.size(); ++i) q[static_cast<int>(i)] = minus[i];
    m = BinaryMeasurement{make_effect(std::move(p)), make_effect(std::move(q)),
                          j.value("label", std::string{})};
    validate_measurement(m);
}

}  // namespace dualrail
