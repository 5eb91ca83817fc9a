#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dualrail/counts.hpp"
#include "dualrail/errors.hpp"
#include "dualrail/ontic.hpp"
#include "dualrail/orbit.hpp"
#include "dualrail/pipeline.hpp"
#include "dualrail/secondary.hpp"
#include "dualrail/tomography.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw dualrail::ValidationError("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_output(const json& j, const std::optional<std::string>& out_path) {
    if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw dualrail::ValidationError("cannot write " + *out_path);
        out << j.dump(2) << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
}

struct GlobalOptions {
    bool json_errors = false;
};

void print_witness_summary(const dualrail::IdealWitnessResult& r) {
    const double witness = r.point.visibility + r.point.distinguishability;
    std::cout << "visibility        V   = " << r.point.visibility << '\n';
    std::cout << "distinguishability P  = " << r.point.distinguishability << '\n';
    std::cout << "witness          V+P  = " << witness << '\n';
    std::cout << "quantum bound  V^2+P^2 = " << (1.0 - r.quantum.margin)
              << (r.quantum.satisfied ? "  (satisfied)" : "  (violated)") << '\n';
    if (!r.noncontextual.satisfied) {
        std::cout << "verdict: violates noncontextual bound by "
                  << -r.noncontextual.margin << '\n';
    } else if (r.noncontextual.margin <= 1e-12) {
        std::cout << "verdict: bound saturated, no violation\n";
    } else {
        std::cout << "verdict: satisfies noncontextual bound (margin "
                  << r.noncontextual.margin << ")\n";
    }
    std::cout << "noncontextual model: " << (r.feasibility.feasible ? "feasible" : "infeasible")
              << (r.feasibility.resolved_exactly ? " (exact arithmetic)" : "") << '\n';
    std::cout << "optimal reflectivity: value " << r.optimum.value << " at";
    for (double m : r.optimum.maximizers) std::cout << ' ' << m;
    std::cout << '\n';
}

void print_report_summary(const dualrail::PipelineResult& result) {
    const auto& rep = result.report;
    std::cout << "selected rank          = " << result.fit.rank << '\n';
    std::cout << "max expectation error  = " << result.max_expectation_error << '\n';
    if (result.max_aligned_state_error) {
        std::cout << "max aligned state error= " << *result.max_aligned_state_error << '\n';
    }
    std::cout << "secondary witness V+P  = " << rep.witness << '\n';
    std::cout << "orbit residuals        = " << rep.orbit.symmetry_residual << ", "
              << rep.orbit.equivalence_residual << '\n';
    std::cout << "noncontextual model    = "
              << (rep.feasibility.feasible ? "feasible" : "infeasible") << '\n';
    std::cout << "verdict                = "
              << (rep.witness > 1.0 ? "violates noncontextual bound" : "no violation") << '\n';
}

int dispatch(const GlobalOptions& global, const std::function<int()>& body) {
    try {
        return body();
    } catch (const dualrail::ValidationError& e) {
        if (global.json_errors) {
            std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
                      << '\n';
        } else {
            std::cerr << "error: " << e.what() << '\n';
        }
        return kExitValidation;
    } catch (const dualrail::SolverFailure& e) {
        if (global.json_errors) {
            std::cerr << json{{"error", {{"type", "solver"}, {"message", e.what()}}}}.dump()
                      << '\n';
        } else {
            std::cerr << "solver failure: " << e.what() << '\n';
        }
        return kExitSolver;
    } catch (const std::exception& e) {
        if (global.json_errors) {
            std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump()
                      << '\n';
        } else {
            std::cerr << "error: " << e.what() << '\n';
        }
        return kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Wave-particle duality toolkit for a simulated Mach-Zehnder dual-rail qubit:\n"
        "tradeoff curves, noncontextuality witnesses, ontological-model feasibility,\n"
        "and a synthetic tomography pipeline."};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_flag("--json", global.json_errors, "emit machine-readable JSON (errors and results)");

    // curves
    auto* curves = app.add_subcommand("curves", "emit visibility/distinguishability curves");
    int curves_grid = 101;
    std::string curves_dir = ".";
    std::vector<std::string> curves_spaces = {"disc", "square", "diamond"};
    curves->add_option("--grid", curves_grid, "grid points per curve")
        ->check(CLI::Range(2, 1000000));
    curves->add_option("--outdir", curves_dir, "output directory");
    curves->add_option("--spaces", curves_spaces, "state spaces to sweep")
        ->delimiter(',');

    // witness
    auto* witness = app.add_subcommand("witness", "ideal-pipeline duality point and verdicts");
    double witness_r = 0.75;
    double witness_noise = 0.0;
    double witness_bias = 0.0;
    std::optional<std::string> witness_out;
    witness->add_option("--r", witness_r, "beamsplitter reflectivity")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    witness->add_option("--noise", witness_noise, "depolarizing strength")
        ->check(CLI::Range(0.0, 1.0));
    witness->add_option("--bias", witness_bias, "effect bias toward the uniform coin")
        ->check(CLI::Range(0.0, 1.0));
    witness->add_option("--out", witness_out, "write the JSON result to this file");

    // orbit-check
    auto* orbit_check = app.add_subcommand("orbit-check", "test the orbit conditions");
    std::string orbit_in;
    double orbit_tol = 1e-9;
    std::optional<std::string> orbit_out;
    orbit_check->add_option("--in", orbit_in, "orbit quadruple JSON")->required();
    orbit_check->add_option("--tol", orbit_tol, "residual tolerance")
        ->check(CLI::PositiveNumber);
    orbit_check->add_option("--out", orbit_out, "write the report to this file");

    // nc-model
    auto* nc_model = app.add_subcommand("nc-model",
                                        "noncontextual ontological model feasibility");
    std::string nc_in;
    double nc_tol = 1e-9;
    std::optional<std::string> nc_out;
    nc_model->add_option("--in", nc_in, "orbit quadruple JSON")->required();
    nc_model->add_option("--tol", nc_tol, "solver tolerance")->check(CLI::PositiveNumber);
    nc_model->add_option("--out", nc_out, "write the result to this file");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample finite-shot counts for the orbit");
    double sim_r = 0.75;
    std::int64_t sim_shots = 100000;
    std::uint64_t sim_seed = 1;
    double sim_noise = 0.0;
    double sim_bias = 0.0;
    std::string sim_out = "counts.csv";
    std::optional<std::string> sim_json_out;
    simulate->add_option("--r", sim_r, "beamsplitter reflectivity")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--shots", sim_shots, "shots per (prep, measurement) cell")
        ->required()
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    simulate->add_option("--seed", sim_seed, "sampling seed")->required();
    simulate->add_option("--noise", sim_noise, "depolarizing strength")
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--bias", sim_bias, "effect bias")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--out", sim_out, "counts CSV path");
    simulate->add_option("--json-mirror", sim_json_out, "also write the counts as JSON");

    // tomography
    auto* tomo = app.add_subcommand("tomography", "theory-agnostic fit of counts");
    std::string tomo_in;
    std::vector<int> tomo_ranks = {1, 2, 3};
    std::uint64_t tomo_seed = 1;
    int tomo_restarts = 4;
    std::optional<std::string> tomo_out;
    tomo->add_option("--in", tomo_in, "counts CSV")->required();
    tomo->add_option("--ranks", tomo_ranks, "rank candidates")->delimiter(',');
    tomo->add_option("--seed", tomo_seed, "fit seed");
    tomo->add_option("--restarts", tomo_restarts, "restarts per rank")
        ->check(CLI::Range(1, 1000));
    tomo->add_option("--out", tomo_out, "fit JSON path");

    // secondary
    auto* secondary = app.add_subcommand("secondary",
                                         "hull-optimal secondary quadruple and witness");
    std::string secondary_fit;
    double secondary_tol = 1e-9;
    std::optional<std::string> secondary_out;
    secondary->add_option("--fit", secondary_fit, "tomography fit JSON")->required();
    secondary->add_option("--tol", secondary_tol, "solver tolerance")
        ->check(CLI::PositiveNumber);
    secondary->add_option("--out", secondary_out, "write the report to this file");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "synthetic end-to-end run");
    dualrail::PipelineConfig pipe_config;
    std::string pipe_dir = "pipeline_out";
    pipeline->add_option("--r", pipe_config.reflectivity, "beamsplitter reflectivity")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    pipeline->add_option("--shots", pipe_config.shots, "shots per cell")
        ->required()
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    pipeline->add_option("--noise", pipe_config.depolarizing, "depolarizing strength")
        ->check(CLI::Range(0.0, 1.0));
    pipeline->add_option("--bias", pipe_config.effect_bias, "effect bias")
        ->check(CLI::Range(0.0, 1.0));
    pipeline->add_option("--seed", pipe_config.seed, "sampling and fit seed")->required();
    pipeline->add_option("--ranks", pipe_config.rank_candidates, "rank candidates")
        ->delimiter(',');
    pipeline->add_option("--restarts", pipe_config.restarts, "restarts per rank")
        ->check(CLI::Range(1, 1000));
    pipeline->add_option("--outdir", pipe_dir, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (curves->parsed()) {
        return dispatch(global, [&] {
            const auto files =
                dualrail::write_tradeoff_curves(curves_dir, curves_grid, curves_spaces);
            if (global.json_errors) {
                json out{{"combined", files.combined.string()}};
                out["per_space"] = json::array();
                for (const auto& p : files.per_space) out["per_space"].push_back(p.string());
                std::cout << out.dump(2) << '\n';
            } else {
                for (const auto& p : files.per_space) std::cout << "wrote " << p.string() << '\n';
                std::cout << "wrote " << files.combined.string() << '\n';
            }
            return 0;
        });
    }
    if (witness->parsed()) {
        return dispatch(global, [&] {
            const auto result = dualrail::run_ideal_witness(
                witness_r, dualrail::make_noise(witness_noise, witness_bias));
            const json j = dualrail::ideal_witness_json(result);
            if (witness_out) write_output(j, witness_out);
            if (global.json_errors) {
                if (!witness_out) write_output(j, std::nullopt);
            } else {
                print_witness_summary(result);
            }
            return 0;
        });
    }
    if (orbit_check->parsed()) {
        return dispatch(global, [&] {
            const auto q = read_json_file(orbit_in).get<dualrail::OrbitQuadruple>();
            const auto report = dualrail::check_orbit(q, orbit_tol);
            write_output(json(report), orbit_out);
            return 0;
        });
    }
    if (nc_model->parsed()) {
        return dispatch(global, [&] {
            const auto q = read_json_file(nc_in).get<dualrail::OrbitQuadruple>();
            const auto result = dualrail::nc_model_feasibility(q, nc_tol);
            write_output(json(result), nc_out);
            return 0;
        });
    }
    if (simulate->parsed()) {
        return dispatch(global, [&] {
            const auto noise = dualrail::make_noise(sim_noise, sim_bias);
            const auto truth = dualrail::apply_noise(dualrail::orbit_preparations(sim_r), noise);
            const std::vector<dualrail::GptVector> preps(truth.states.begin(),
                                                         truth.states.end());
            const std::vector<dualrail::BinaryMeasurement> measurements = {truth.m,
                                                                           truth.m_prime};
            const auto table = dualrail::sample_counts(preps, measurements, sim_shots, sim_seed);
            std::ofstream out(sim_out, std::ios::binary);
            if (!out) throw dualrail::ValidationError("cannot write " + sim_out);
            dualrail::write_counts_csv(table, out);
            if (sim_json_out) write_output(json(table), sim_json_out);
            if (!global.json_errors) std::cout << "wrote " << sim_out << '\n';
            return 0;
        });
    }
    if (tomo->parsed()) {
        return dispatch(global, [&] {
            std::ifstream in(tomo_in);
            if (!in) throw dualrail::ValidationError("cannot open " + tomo_in);
            const auto table = dualrail::read_counts_csv(in);
            const auto fit = dualrail::fit_gpt(table, tomo_ranks, tomo_seed, tomo_restarts);
            write_output(json(fit), tomo_out);
            return 0;
        });
    }
    if (secondary->parsed()) {
        return dispatch(global, [&] {
            const auto fit = read_json_file(secondary_fit).get<dualrail::TomographyFit>();
            const auto m = fit.measurement(fit.measurement_index("Z"));
            const auto m_prime = fit.measurement(fit.measurement_index("X"));
            const auto quadruple =
                dualrail::find_secondary_quadruple(fit.states, m, m_prime, secondary_tol);
            const auto report = dualrail::witness_report(quadruple, secondary_tol);
            json j{{"secondary", quadruple}, {"witness_report", report}};
            if (secondary_out) write_output(j, secondary_out);
            if (global.json_errors) {
                if (!secondary_out) write_output(j, std::nullopt);
            } else {
                std::cout << "visibility          V  = " << report.visibility << '\n';
                std::cout << "distinguishability  P  = " << report.distinguishability << '\n';
                std::cout << "witness            V+P = " << report.witness << '\n';
                std::cout << "orbit residuals        = " << report.orbit.symmetry_residual
                          << ", " << report.orbit.equivalence_residual << '\n';
                std::cout << "noncontextual model    = "
                          << (report.feasibility.feasible ? "feasible" : "infeasible") << '\n';
                std::cout << "verdict                = "
                          << (report.witness > 1.0 ? "violates noncontextual bound"
                                                   : "no violation")
                          << '\n';
            }
            return 0;
        });
    }
    if (pipeline->parsed()) {
        return dispatch(global, [&] {
            const auto result = dualrail::run_pipeline(pipe_config);
            const auto artifacts = dualrail::write_pipeline_artifacts(result, pipe_dir);
            if (global.json_errors) {
                std::cout << json{{"counts", artifacts.counts_csv.string()},
                                  {"fit", artifacts.fit_json.string()},
                                  {"report", artifacts.report_json.string()}}
                                 .dump(2)
                          << '\n';
            } else {
                print_report_summary(result);
                std::cout << "artifacts in " << pipe_dir << '\n';
            }
            return 0;
        });
    }
    return kExitValidation;
}
