#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

#include "dualrail/interferometer.hpp"
#include "dualrail/pipeline.hpp"
#include "dualrail/secondary.hpp"

using namespace dualrail;

namespace {

std::vector<GptVector> plane_orbit_states(double r, double p = 0.0) {
    const OrbitQuadruple q = apply_noise(orbit_preparations(r), make_noise(p));
    std::vector<GptVector> states;
    for (const auto& s : q.states) states.push_back(to_plane(s));
    return states;
}

}  // namespace

TEST_CASE("an exact orbit is its own secondary quadruple") {
    const auto realized = plane_orbit_states(0.75);
    const auto q = find_secondary_quadruple(realized, which_way(3), which_phase(3));
    CHECK(q.witness == doctest::Approx(0.5 + std::sqrt(3.0) / 2.0).epsilon(1e-9));
    CHECK((q.weights - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(check_orbit(q.quadruple, 1e-9).pass);
}

TEST_CASE("depolarized orbits shrink the witness linearly") {
    const auto realized = plane_orbit_states(0.75, 0.1);
    const auto q = find_secondary_quadruple(realized, which_way(3), which_phase(3));
    CHECK(q.witness == doctest::Approx(0.9 * (0.5 + std::sqrt(3.0) / 2.0)).epsilon(1e-9));
}

TEST_CASE("degenerate hulls") {
    SUBCASE("the mixed state alone gives a zero witness") {
        const std::vector<GptVector> realized = {mixed_state(3)};
        const auto q = find_secondary_quadruple(realized, which_way(3), which_phase(3));
        CHECK(q.witness == doctest::Approx(0.0));
        CHECK(check_orbit(q.quadruple, 1e-9).pass);
    }

    SUBCASE("a single polarized state admits no orbit") {
        const std::vector<GptVector> realized = {plane_state(0.8, 0.0)};
        CHECK_THROWS_AS(find_secondary_quadruple(realized, which_way(3), which_phase(3)),
                        InfeasibleOrbit);
    }
}

TEST_CASE("witness reports at the canonical operating points") {
    SUBCASE("r = 3/4 violates and the model search agrees") {
        const auto q = find_secondary_quadruple(plane_orbit_states(0.75), which_way(3),
                                                which_phase(3));
        const WitnessReport report = witness_report(q);
        CHECK(report.witness - 1.0 == doctest::Approx(0.3660254).epsilon(1e-6));
        CHECK_FALSE(report.feasibility.feasible);
        CHECK(report.consistent);
        CHECK(report.orbit.pass);
    }

    SUBCASE("p = 0.3 depolarizing removes the violation") {
        const auto q = find_secondary_quadruple(plane_orbit_states(0.75, 0.3), which_way(3),
                                                which_phase(3));
        const WitnessReport report = witness_report(q);
        CHECK(report.witness == doctest::Approx(0.7 * (0.5 + std::sqrt(3.0) / 2.0)).epsilon(1e-9));
        CHECK(report.feasibility.feasible);
        CHECK(report.consistent);
    }

    SUBCASE("r = 1/2 saturates the bound") {
        const auto q = find_secondary_quadruple(plane_orbit_states(0.5), which_way(3),
                                                which_phase(3));
        const WitnessReport report = witness_report(q);
        CHECK(report.witness == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(report.feasibility.feasible);
        CHECK(report.consistent);
    }
}

TEST_CASE("the witness never exceeds the hull bound") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    const BinaryMeasurement z = which_way(3);
    const BinaryMeasurement x = which_phase(3);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<GptVector> realized = {mixed_state(3)};
        const int extra = 3 + static_cast<int>(rng() % 4);
        for (int i = 0; i < extra; ++i) {
            const double theta = angle(rng);
            const double t = radius(rng);
            realized.push_back(plane_state(t * std::cos(theta), t * std::sin(theta)));
        }
        const auto q = find_secondary_quadruple(realized, z, x);
        double hull_bound = 0.0;
        for (const auto& s : realized) {
            hull_bound = std::max(hull_bound,
                                  predictability(s, z) + predictability(s, x));
        }
        CHECK(q.witness <= hull_bound + 1e-9);
        CHECK(check_orbit(q.quadruple, 1e-9).pass);
    }
}

TEST_CASE("weights are row-stochastic") {
    const auto q = find_secondary_quadruple(plane_orbit_states(0.8, 0.05), which_way(3),
                                            which_phase(3));
    for (int k = 0; k < 4; ++k) {
        CHECK(q.weights.row(k).minCoeff() >= -1e-12);
        CHECK(q.weights.row(k).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("increasing pipeline noise never increases the reported witness") {
    double previous = std::numeric_limits<double>::infinity();
    for (double p : {0.0, 0.15, 0.3}) {
        PipelineConfig config;
        config.reflectivity = 0.75;
        config.shots = 20000;
        config.depolarizing = p;
        config.seed = 5;
        const PipelineResult result = run_pipeline(config);
        CHECK(result.report.witness < previous);
        previous = result.report.witness;
    }
}

TEST_CASE("secondary results serialize") {
    const auto q = find_secondary_quadruple(plane_orbit_states(0.75, 0.1), which_way(3),
                                            which_phase(3));
    const WitnessReport report = witness_report(q);
    const nlohmann::json j = report;
    CHECK(j.at("witness").get<double>() == doctest::Approx(q.witness));
    CHECK(j.at("feasibility").at("status") == "infeasible");
}
