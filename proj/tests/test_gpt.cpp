#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

#include "dualrail/gpt.hpp"
#include "dualrail/interferometer.hpp"
#include "oracles.hpp"

using namespace dualrail;

namespace {

GptVector plane_effect(double c, double ex, double ez) {
    Eigen::VectorXd v(3);
    v << c, ex, ez;
    return make_effect(std::move(v));
}

}  // namespace

TEST_CASE("probability pairs states and effects by dot product") {
    const GptVector mixed = mixed_state(3);
    CHECK(probability(mixed, plane_effect(0.5, 0.5, 0.0)) == doctest::Approx(0.5));

    const GptVector z_up = plane_state(0.0, 1.0);
    CHECK(probability(z_up, plane_effect(0.5, 0.0, 0.5)) == doctest::Approx(1.0));

    // Reflectivity-3/4 preparation against the which-way plus effect,
    // cross-checked with the density-matrix oracle.
    const GptVector psi1 = prepare(make_settings(0.75, 0.0));
    const auto dm = oracle::DualRailState::from_settings(0.75, 0.0);
    const double p = probability(psi1, which_way(4).plus_effect);
    CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p == doctest::Approx(dm.prob_left()).epsilon(1e-12));
}

TEST_CASE("probability rejects bad pairings") {
    const GptVector s = plane_state(0.0, 0.0);
    Eigen::VectorXd big(4);
    big << 0.5, 0, 0, 0.5;
    CHECK_THROWS_AS(probability(s, make_effect(std::move(big))), DimensionMismatch);
    CHECK_THROWS_AS(probability(s, plane_effect(2.0, 0.0, 0.0)), ProbabilityOutOfRange);
    CHECK_THROWS_AS(probability(s, s), KindMismatch);
}

TEST_CASE("expectation values of the canonical preparations") {
    const GptVector mixed = mixed_state(4);
    CHECK(expectation(mixed, which_way(4)) == doctest::Approx(0.0));
    CHECK(expectation(mixed, which_phase(4)) == doctest::Approx(0.0));

    const GptVector psi1 = prepare(make_settings(0.75, 0.0));
    const auto dm = oracle::DualRailState::from_settings(0.75, 0.0);
    CHECK(expectation(psi1, which_way(4)) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(expectation(psi1, which_way(4)) == doctest::Approx(dm.expect_z()).epsilon(1e-12));
    CHECK(expectation(psi1, which_phase(4)) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
    CHECK(expectation(psi1, which_phase(4)) == doctest::Approx(dm.expect_x()).epsilon(1e-12));
}

TEST_CASE("predictability is symmetric in the outcome labels") {
    const GptVector psi1 = prepare(make_settings(0.75, 0.0));
    BinaryMeasurement x = which_phase(4);
    const double before = predictability(psi1, x);
    std::swap(x.plus_effect, x.minus_effect);
    CHECK(predictability(psi1, x) == doctest::Approx(before));
    CHECK(before == doctest::Approx(std::sqrt(3.0) / 2.0));

    CHECK(predictability(mixed_state(4), which_way(4)) == doctest::Approx(0.0));
    CHECK(predictability(plane_state(0.0, 1.0), which_way(3)) == doctest::Approx(1.0));
}

TEST_CASE("mix forms convex combinations") {
    const GptVector z_up = plane_state(0.0, 1.0);
    const GptVector z_down = plane_state(0.0, -1.0);

    Eigen::VectorXd one(1);
    one << 1.0;
    const GptVector same = mix({z_up}, one);
    CHECK((same.coords - z_up.coords).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Eigen::VectorXd half(2);
    half << 0.5, 0.5;
    const GptVector mixed = mix({z_up, z_down}, half);
    CHECK((mixed.coords - mixed_state(3).coords).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));

    // Equal mixtures of opposite orbit pairs agree (r = 0.7).
    const OrbitQuadruple q = orbit_preparations(0.7);
    const GptVector left = mix({q.states[0], q.states[2]}, half);
    const GptVector right = mix({q.states[1], q.states[3]}, half);
    CHECK((left.coords - right.coords).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mix validates weights") {
    const GptVector s = plane_state(0.3, 0.4);
    Eigen::VectorXd bad(2);
    bad << 0.6, 0.6;
    CHECK_THROWS_AS(mix({s, s}, bad), BadWeights);
    bad << -0.1, 1.1;
    CHECK_THROWS_AS(mix({s, s}, bad), BadWeights);
    CHECK_THROWS_AS(mix(std::vector<GptVector>{}, Eigen::VectorXd{}), BadWeights);
}

TEST_CASE("probability is linear under mixing") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GptVector> states;
        const int n = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i) {
            double x = unit(rng), z = unit(rng);
            const double norm = std::hypot(x, z);
            if (norm > 1.0) {
                x /= norm;
                z /= norm;
            }
            states.push_back(plane_state(x, z));
        }
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = static_cast<double>(rng() % 1000) + 1.0;
        w /= w.sum();

        const GptVector blended = mix(states, w);
        const GptVector effect = plane_effect(0.5, 0.3, -0.2);
        double expected = 0.0;
        for (int i = 0; i < n; ++i) expected += w[i] * probability(states[i], effect);
        CHECK(probability(blended, effect) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("contains on the named bodies") {
    const auto disc = StateSpaceModel::disc();
    CHECK(contains(disc, plane_state(0.6, 0.8)));
    CHECK_FALSE(contains(disc, plane_state(0.8, 0.8)));

    const auto diamond = StateSpaceModel::diamond();
    CHECK_FALSE(contains(diamond, plane_state(0.5, 0.6)));
    CHECK(contains(diamond, plane_state(0.5, 0.5)));

    const auto square = StateSpaceModel::square();
    CHECK(contains(square, plane_state(1.0, 1.0)));
    CHECK_FALSE(contains(square, plane_state(1.1, 0.0)));

    // A 4-gon with vertices on the axes is the diamond.
    const auto ngon4 = StateSpaceModel::regular_polygon(4);
    CHECK(contains(ngon4, plane_state(0.5, 0.5)));
    CHECK_FALSE(contains(ngon4, plane_state(0.5, 0.6)));

    // The Bloch ball is the disc in embedding dimension 4.
    const auto ball = StateSpaceModel::disc(4);
    CHECK(contains(ball, qubit_state(0.6, 0.0, 0.8)));
    CHECK_FALSE(contains(ball, qubit_state(0.6, 0.5, 0.8)));
}

TEST_CASE("contains is monotone under mixing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    for (const auto& space :
         {StateSpaceModel::disc(), StateSpaceModel::diamond(), StateSpaceModel::square()}) {
        for (int trial = 0; trial < 30; ++trial) {
            const double ta = angle(rng), tb = angle(rng);
            const Eigen::Vector2d pa = radius(rng) * boundary_point(space, ta);
            const Eigen::Vector2d pb = radius(rng) * boundary_point(space, tb);
            const GptVector a = plane_state(pa.x(), pa.y());
            const GptVector b = plane_state(pb.x(), pb.y());
            REQUIRE(contains(space, a));
            REQUIRE(contains(space, b));
            for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                Eigen::VectorXd w(2);
                w << t, 1.0 - t;
                CHECK(contains(space, mix({a, b}, w)));
            }
        }
    }
}

TEST_CASE("orthogonal measurements on disc states respect the quadratic bound") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double phi = angle(rng);
        Eigen::VectorXd u(2), v(2);
        u << std::cos(phi), std::sin(phi);
        v << -std::sin(phi), std::cos(phi);
        const BinaryMeasurement m = measurement_from_direction(u, "A");
        const BinaryMeasurement mp = measurement_from_direction(v, "B");

        const double theta = angle(rng);
        const double t = radius(rng);
        const GptVector s = plane_state(t * std::cos(theta), t * std::sin(theta));
        const double em = expectation(s, m);
        const double emp = expectation(s, mp);
        CHECK(em * em + emp * emp <= 1.0 + 1e-12);
    }
}

TEST_CASE("effect_range brackets the probabilities over a body") {
    const auto disc = StateSpaceModel::disc();
    const auto [lo, hi] = effect_range(disc, plane_effect(0.5, 0.0, 0.5));
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.0));

    const auto diamond = StateSpaceModel::diamond();
    const auto [dlo, dhi] = effect_range(diamond, plane_effect(0.5, 0.25, 0.25));
    CHECK(dlo == doctest::Approx(0.25));
    CHECK(dhi == doctest::Approx(0.75));
}

TEST_CASE("vectors and measurements round-trip through JSON") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        GptVector s = plane_state(unit(rng), unit(rng));
        const nlohmann::json j = s;
        const auto back = j.get<GptVector>();
        CHECK(back.kind == s.kind);
        CHECK((back.coords - s.coords).cwiseAbs().maxCoeff() == 0);  // bit-exact round-trip
    }

    const BinaryMeasurement m = which_way(4);
    const nlohmann::json j = m;
    const auto back = j.get<BinaryMeasurement>();
    CHECK(back.label == m.label);
    CHECK((back.plus_effect.coords - m.plus_effect.coords).cwiseAbs().maxCoeff() == 0);
    CHECK((back.minus_effect.coords - m.minus_effect.coords).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("polytope constructor hulls its vertices and requires the mixed point") {
    const std::vector<Eigen::Vector2d> pts = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.1, 0.1}};
    const auto body = StateSpaceModel::polytope(pts);
    CHECK(body.vertices().size() == 4);  // the interior point is dropped
    CHECK(contains(body, plane_state(0.4, 0.4)));

    const std::vector<Eigen::Vector2d> shifted = {{2, 1}, {3, 1}, {2.5, 2}};
    CHECK_THROWS_AS(StateSpaceModel::polytope(shifted), ValidationError);
}
