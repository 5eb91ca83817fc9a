#include "dualrail/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>

namespace dualrail {

namespace {

// Shortest round-trip decimal form; identical on every platform.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << content;
}

}  // namespace

std::string tradeoff_curve_csv(const TradeoffCurve& curve) {
    std::string csv = "P,V,space\n";
    for (const auto& pt : curve.points) {
        csv += format_double(pt.distinguishability);
        csv += ',';
        csv += format_double(pt.visibility);
        csv += ',';
        csv += curve.space_label;
        csv += '\n';
    }
    return csv;
}

TradeoffCurve noncontextual_line(int grid) {
    if (grid < 2) throw ValidationError("noncontextual_line: grid must be >= 2");
    TradeoffCurve curve;
    curve.space_label = "noncontextual";
    curve.points.reserve(grid);
    for (int k = 0; k < grid; ++k) {
        const double p = static_cast<double>(k) / (grid - 1);
        curve.points.push_back(DualityPoint{1.0 - p, p, std::nullopt});
    }
    return curve;
}

StateSpaceModel space_by_name(const std::string& name) {
    if (name == "disc") return StateSpaceModel::disc();
    if (name == "square") return StateSpaceModel::square();
    if (name == "diamond") return StateSpaceModel::diamond();
    if (name.rfind("ngon", 0) == 0) {
        int sides = 0;
        const std::string tail = name.substr(4);
        const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), sides);
        if (res.ec == std::errc{} && res.ptr == tail.data() + tail.size()) {
            return StateSpaceModel::regular_polygon(sides);
        }
    }
    throw ValidationError("unknown state space: " + name +
                          " (expected disc, square, diamond or ngon<k>)");
}

CurveFiles write_tradeoff_curves(const std::filesystem::path& directory, int grid,
                                 const std::vector<std::string>& spaces) {
    // Compute every curve before the first write, so a bad space name or an
    // empty slice leaves no partial output behind.
    std::vector<std::pair<std::string, std::string>> payloads;
    for (const auto& name : spaces) {
        payloads.emplace_back(name + ".csv",
                              tradeoff_curve_csv(tradeoff_sweep(space_by_name(name), grid)));
    }
    const TradeoffCurve disc = tradeoff_sweep(StateSpaceModel::disc(), grid);
    std::string combined = tradeoff_curve_csv(disc);
    const std::string line_csv = tradeoff_curve_csv(noncontextual_line(grid));
    combined += line_csv.substr(line_csv.find('\n') + 1);  // drop the second header

    std::filesystem::create_directories(directory);
    CurveFiles files;
    for (const auto& [name, payload] : payloads) {
        const auto path = directory / name;
        write_text_file(path, payload);
        files.per_space.push_back(path);
    }
    files.combined = directory / "combined.csv";
    write_text_file(files.combined, combined);
    return files;
}

IdealWitnessResult run_ideal_witness(double reflectivity, const NoiseModel& noise, double tol) {
    IdealWitnessResult result;
    result.quadruple = apply_noise(orbit_preparations(reflectivity), noise);
    result.point = duality_point(result.quadruple.states[0], "r=" + format_double(reflectivity));
    result.noncontextual = nc_bound_satisfied(result.point);
    result.quantum = quantum_bound_satisfied(result.point);
    result.feasibility = nc_model_feasibility(result.quadruple, tol);
    result.optimum = optimal_reflectivity();
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    PipelineResult result;
    result.config = config;

    const NoiseModel noise = make_noise(config.depolarizing, config.effect_bias);
    const OrbitQuadruple truth = apply_noise(orbit_preparations(config.reflectivity), noise);
    const std::vector<GptVector> prep_states(truth.states.begin(), truth.states.end());
    const std::vector<BinaryMeasurement> measurements = {truth.m, truth.m_prime};

    result.counts = sample_counts(prep_states, measurements, config.shots, config.seed);

    FitOptions options;
    result.fit = fit_gpt(result.counts, config.rank_candidates, config.seed, config.restarts,
                         options);

    result.max_expectation_error = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double truth_expectation =
                2.0 * probability(prep_states[i], measurements[j].plus_effect) - 1.0;
            const double err =
                std::abs(result.fit.fitted_expectation(i, j) - truth_expectation);
            result.max_expectation_error = std::max(result.max_expectation_error, err);
        }
    }

    if (result.fit.rank == 3) {
        std::vector<GptVector> reference;
        reference.reserve(4);
        for (const auto& s : truth.states) reference.push_back(to_plane(s));
        const TomographyFit aligned = gauge_align(result.fit, reference);
        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            err = std::max(err, (aligned.states[i].coords - reference[i].coords)
                                    .cwiseAbs()
                                    .maxCoeff());
        }
        result.max_aligned_state_error = err;
    }

    const BinaryMeasurement m = result.fit.measurement(result.fit.measurement_index("Z"));
    const BinaryMeasurement m_prime = result.fit.measurement(result.fit.measurement_index("X"));
    result.secondary =
        find_secondary_quadruple(result.fit.states, m, m_prime, config.tol);
    result.report = witness_report(result.secondary, config.tol);
    return result;
}

nlohmann::json pipeline_report_json(const PipelineResult& result) {
    nlohmann::json j{
        {"config",
         {
             {"reflectivity", result.config.reflectivity},
             {"shots", result.config.shots},
             {"depolarizing", result.config.depolarizing},
             {"effect_bias", result.config.effect_bias},
             {"seed", result.config.seed},
             {"rank_candidates", result.config.rank_candidates},
             {"restarts", result.config.restarts},
             {"tol", result.config.tol},
         }},
        {"max_expectation_error", result.max_expectation_error},
        {"secondary", result.secondary},
        {"witness_report", result.report},
    };
    if (result.max_aligned_state_error) {
        j["max_aligned_state_error"] = *result.max_aligned_state_error;
    }
    return j;
}

PipelineArtifacts write_pipeline_artifacts(const PipelineResult& result,
                                           const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    PipelineArtifacts artifacts;

    artifacts.counts_csv = directory / "counts.csv";
    std::ofstream counts_out(artifacts.counts_csv, std::ios::binary);
    if (!counts_out) throw ValidationError("cannot write " + artifacts.counts_csv.string());
    write_counts_csv(result.counts, counts_out);
    counts_out.close();

    artifacts.fit_json = directory / "fit.json";
    write_text_file(artifacts.fit_json, nlohmann::json(result.fit).dump(2) + "\n");

    artifacts.report_json = directory / "report.json";
    write_text_file(artifacts.report_json, pipeline_report_json(result).dump(2) + "\n");
    return artifacts;
}

nlohmann::json ideal_witness_json(const IdealWitnessResult& result) {
    return nlohmann::json{
        {"visibility", result.point.visibility},
        {"distinguishability", result.point.distinguishability},
        {"witness", result.point.visibility + result.point.distinguishability},
        {"noncontextual_margin", result.noncontextual.margin},
        {"noncontextual_satisfied", result.noncontextual.satisfied},
        {"quantum_margin", result.quantum.margin},
        {"quantum_satisfied", result.quantum.satisfied},
        {"feasibility", result.feasibility},
        {"optimal_reflectivity",
         {
             {"maximizers", result.optimum.maximizers},
             {"value", result.optimum.value},
         }},
    };
}

}  // namespace dualrail
