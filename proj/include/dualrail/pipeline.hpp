#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dualrail/counts.hpp"
#include "dualrail/duality.hpp"
#include "dualrail/interferometer.hpp"
#include "dualrail/ontic.hpp"
#include "dualrail/secondary.hpp"
#include "dualrail/tomography.hpp"

namespace dualrail {

/// CSV rows "P,V,space" for one curve.
std::string tradeoff_curve_csv(const TradeoffCurve& curve);

/// The linear bound V = 1 - P on the same grid, labelled "noncontextual".
TradeoffCurve noncontextual_line(int grid);

struct CurveFiles {
    std::vector<std::filesystem::path> per_space;
    std::filesystem::path combined;
};

/// One CSV per requested space plus combined.csv holding the disc curve and
/// the noncontextual line.
CurveFiles write_tradeoff_curves(const std::filesystem::path& directory, int grid,
                                 const std::vector<std::string>& spaces);

StateSpaceModel space_by_name(const std::string& name);

/// Witness evaluation of the ideal (infinite-statistics) set-up at one
/// reflectivity, with optional noise.
struct IdealWitnessResult {
    DualityPoint point;
    BoundCheck noncontextual;
    BoundCheck quantum;
    OrbitQuadruple quadruple;
    FeasibilityResult feasibility;
    ReflectivityOptimum optimum;
};

IdealWitnessResult run_ideal_witness(double reflectivity, const NoiseModel& noise,
                                     double tol = 1e-9);

struct PipelineConfig {
    double reflectivity = 0.75;
    std::int64_t shots = 100000;
    double depolarizing = 0.0;
    double effect_bias = 0.0;
    std::uint64_t seed = 1;
    std::vector<int> rank_candidates = {1, 2, 3};
    int restarts = 4;
    double tol = 1e-9;
};

/// Synthetic end-to-end run: sample counts from the noisy orbit, fit states
/// and effects theory-agnostically, build the hull-optimal secondary
/// quadruple on the fitted fragment, and evaluate the witness.
struct PipelineResult {
    PipelineConfig config;
    CountsTable counts;
    TomographyFit fit;
    // Largest |fitted - sampled-truth| expectation over (prep, measurement).
    double max_expectation_error = 0.0;
    // Largest state-coordinate deviation from the noisy truth after gauge
    // alignment (meaningful when the selected rank matches the fragment).
    std::optional<double> max_aligned_state_error;
    SecondaryQuadruple secondary;
    WitnessReport report;
};

PipelineResult run_pipeline(const PipelineConfig& config);

/// Writes counts.csv, fit.json and report.json; byte-deterministic for a
/// fixed config.
struct PipelineArtifacts {
    std::filesystem::path counts_csv;
    std::filesystem::path fit_json;
    std::filesystem::path report_json;
};

PipelineArtifacts write_pipeline_artifacts(const PipelineResult& result,
                                           const std::filesystem::path& directory);

nlohmann::json pipeline_report_json(const PipelineResult& result);
nlohmann::json ideal_witness_json(const IdealWitnessResult& result);

}  // namespace dualrail
