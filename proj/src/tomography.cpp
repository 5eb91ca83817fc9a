#include "dualrail/tomography.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dualrail {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double binomial_weight(double f, double shots) {
    return shots / (f * (1.0 - f) + 1.0 / shots);
}

// Successes landing in a without-replacement subsample of size draw.
std::int64_t hypergeometric_draw(std::int64_t successes, std::int64_t total, std::int64_t draw,
                                 std::mt19937_64& rng) {
    std::int64_t s = successes;
    std::int64_t m = total;
    std::int64_t hits = 0;
    for (std::int64_t k = 0; k < draw; ++k) {
        const double p = static_cast<double>(s) / static_cast<double>(m);
        if (uniform01(rng) < p) {
            ++hits;
            --s;
        }
        --m;
    }
    return hits;
}

struct Factorization {
    Eigen::MatrixXd states;   // P x d, first column all ones
    Eigen::MatrixXd effects;  // d x K, plus-effect coordinates per column
};

double weighted_residual(const Factorization& f, const Eigen::MatrixXd& freq,
                         const Eigen::MatrixXd& weight) {
    const Eigen::MatrixXd predicted = f.states * f.effects;
    return (weight.array() * (freq - predicted).array().square()).sum();
}

// One exact weighted-least-squares update of the effects, then the states.
// Neither step can increase the training objective.
void als_sweep(Factorization& f, const Eigen::MatrixXd& freq, const Eigen::MatrixXd& weight) {
    const int preps = static_cast<int>(freq.rows());
    const int cols = static_cast<int>(freq.cols());
    const int rank = static_cast<int>(f.states.cols());

    for (int j = 0; j < cols; ++j) {
        Eigen::MatrixXd design(preps, rank);
        Eigen::VectorXd target(preps);
        for (int i = 0; i < preps; ++i) {
            const double sw = std::sqrt(weight(i, j));
            design.row(i) = sw * f.states.row(i);
            target(i) = sw * freq(i, j);
        }
        f.effects.col(j) = design.colPivHouseholderQr().solve(target);
    }

    if (rank == 1) return;
    for (int i = 0; i < preps; ++i) {
        Eigen::MatrixXd design(cols, rank - 1);
        Eigen::VectorXd target(cols);
        for (int j = 0; j < cols; ++j) {
            const double sw = std::sqrt(weight(i, j));
            design.row(j) = sw * f.effects.col(j).tail(rank - 1).transpose();
            target(j) = sw * (freq(i, j) - f.effects(0, j));
        }
        f.states.row(i).tail(rank - 1) =
            design.colPivHouseholderQr().solve(target).transpose();
    }
}

struct AlsRun {
    Factorization factorization;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    bool converged = false;
};

AlsRun run_als(const Eigen::MatrixXd& freq, const Eigen::MatrixXd& weight, int rank,
               std::uint64_t seed, const FitOptions& options) {
    const int preps = static_cast<int>(freq.rows());
    const int cols = static_cast<int>(freq.cols());
    std::mt19937_64 rng(seed);

    AlsRun run;
    run.factorization.states = Eigen::MatrixXd::Ones(preps, rank);
    run.factorization.effects = Eigen::MatrixXd::Zero(rank, cols);
    for (int i = 0; i < preps; ++i) {
        for (int c = 1; c < rank; ++c) {
            run.factorization.states(i, c) = uniform01(rng) - 0.5;
        }
    }
    for (int j = 0; j < cols; ++j) {
        run.factorization.effects(0, j) = 0.5;
        for (int c = 1; c < rank; ++c) {
            run.factorization.effects(c, j) = 0.5 * (uniform01(rng) - 0.5);
        }
    }

    double previous = weighted_residual(run.factorization, freq, weight);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        als_sweep(run.factorization, freq, weight);
        const double residual = weighted_residual(run.factorization, freq, weight);
        if (residual > previous + 1e-9 * (1.0 + previous)) {
            throw SolverFailure("alternating least squares increased the objective");
        }
        run.history.push_back(residual);
        if (std::abs(previous - residual) <= options.relative_tol * (1.0 + residual) ||
            residual < 1e-24) {
            run.converged = true;
            run.residual = residual;
            return run;
        }
        previous = residual;
    }
    run.residual = previous;
    return run;
}

AlsRun best_restart(const Eigen::MatrixXd& freq, const Eigen::MatrixXd& weight, int rank,
                    std::uint64_t seed, int restarts, const FitOptions& options,
                    std::uint64_t salt) {
    AlsRun best;
    for (int attempt = 0; attempt < restarts; ++attempt) {
        AlsRun run = run_als(freq, weight, rank,
                             mix_seed(seed, salt * 1000 + rank * 16 + attempt), options);
        if (run.converged && run.residual < best.residual) best = std::move(run);
    }
    return best;
}

// Smallest mixing toward the coin effect (1/2, 0, ...) that puts every
// predicted probability of this column inside [0,1].
void project_effect_column(Eigen::MatrixXd& effects, const Eigen::MatrixXd& states, int col) {
    const Eigen::VectorXd p = states * effects.col(col);
    double t = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) > 1.0) t = std::max(t, (p(i) - 1.0) / (p(i) - 0.5));
        if (p(i) < 0.0) t = std::max(t, -p(i) / (0.5 - p(i)));
    }
    if (t > 0.0) {
        t = std::min(t, 1.0);
        effects.col(col) *= 1.0 - t;
        effects(0, col) += 0.5 * t;
    }
}

}  // namespace

FrequencyData frequency_data_from_counts(const CountsTable& counts, std::uint64_t seed,
                                         double holdout_fraction) {
    if (counts.num_preps() == 0 || counts.num_measurements() == 0) {
        throw ValidationError("tomography: counts table is empty");
    }
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
        throw ValidationError("tomography: holdout fraction must lie in [0,1)");
    }
    const int preps = counts.num_preps();
    const int cols = counts.num_measurements();
    const std::int64_t shots = counts.shots;
    const auto holdout_shots = static_cast<std::int64_t>(
        std::llround(holdout_fraction * static_cast<double>(shots)));
    const std::int64_t train_shots = shots - holdout_shots;

    FrequencyData data;
    data.prep_ids = counts.prep_ids;
    data.measurement_labels = counts.measurement_labels;
    data.freq.resize(preps, cols);
    data.weight.resize(preps, cols);
    data.train_freq.resize(preps, cols);
    data.train_weight.resize(preps, cols);
    data.holdout_freq.resize(preps, cols);
    data.holdout_weight.resize(preps, cols);

    for (int i = 0; i < preps; ++i) {
        for (int j = 0; j < cols; ++j) {
            const std::int64_t plus = counts.plus_counts(i, j);
            const double f = static_cast<double>(plus) / static_cast<double>(shots);
            data.freq(i, j) = f;
            data.weight(i, j) = binomial_weight(f, static_cast<double>(shots));
            if (holdout_shots == 0 || train_shots == 0) {
                data.train_freq(i, j) = f;
                data.train_weight(i, j) = data.weight(i, j);
                data.holdout_freq(i, j) = f;
                data.holdout_weight(i, j) = data.weight(i, j);
                continue;
            }
            std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i) * cols + j));
            const std::int64_t train_plus = hypergeometric_draw(plus, shots, train_shots, rng);
            const double ft = static_cast<double>(train_plus) / static_cast<double>(train_shots);
            const double fh = static_cast<double>(plus - train_plus) /
                              static_cast<double>(holdout_shots);
            data.train_freq(i, j) = ft;
            data.train_weight(i, j) = binomial_weight(ft, static_cast<double>(train_shots));
            data.holdout_freq(i, j) = fh;
            data.holdout_weight(i, j) = binomial_weight(fh, static_cast<double>(holdout_shots));
        }
    }
    return data;
}

FrequencyData frequency_data_from_probabilities(const std::vector<std::string>& prep_ids,
                                                const std::vector<std::string>& measurement_labels,
                                                const Eigen::MatrixXd& probabilities) {
    if (prep_ids.empty() || measurement_labels.empty()) {
        throw ValidationError("tomography: empty probability table");
    }
    if (probabilities.rows() != static_cast<int>(prep_ids.size()) ||
        probabilities.cols() != static_cast<int>(measurement_labels.size())) {
        throw DimensionMismatch("tomography: probability table shape mismatch");
    }
    FrequencyData data;
    data.prep_ids = prep_ids;
    data.measurement_labels = measurement_labels;
    data.freq = probabilities;
    data.weight = Eigen::MatrixXd::Ones(probabilities.rows(), probabilities.cols());
    data.train_freq = data.freq;
    data.train_weight = data.weight;
    data.holdout_freq = data.freq;
    data.holdout_weight = data.weight;
    return data;
}

BinaryMeasurement TomographyFit::measurement(int index) const {
    const GptVector& plus = plus_effects.at(index);
    Eigen::VectorXd minus = -plus.coords;
    minus[0] += 1.0;
    return BinaryMeasurement{plus, make_effect(std::move(minus)), measurement_labels.at(index)};
}

int TomographyFit::measurement_index(const std::string& label) const {
    for (size_t j = 0; j < measurement_labels.size(); ++j) {
        if (measurement_labels[j] == label) return static_cast<int>(j);
    }
    throw ValidationError("tomography fit has no measurement labelled " + label);
}

double TomographyFit::fitted_expectation(int prep, int meas) const {
    return 2.0 * states.at(prep).coords.dot(plus_effects.at(meas).coords) - 1.0;
}

TomographyFit fit_gpt(const FrequencyData& data, const std::vector<int>& rank_candidates,
                      std::uint64_t seed, int restarts, const FitOptions& options) {
    const int preps = data.num_preps();
    const int cols = data.num_measurements();
    if (preps == 0 || cols == 0) throw ValidationError("fit_gpt: empty data");
    if (rank_candidates.empty()) throw ValidationError("fit_gpt: no rank candidates");
    if (restarts < 1) throw ValidationError("fit_gpt: restarts must be >= 1");
    const int max_rank = std::min(preps, cols + 1);
    int requested_max = 1;
    for (int rank : rank_candidates) {
        if (rank < 1 || rank > max_rank) {
            throw ValidationError("fit_gpt: rank " + std::to_string(rank) +
                                  " outside [1, " + std::to_string(max_rank) + "]");
        }
        requested_max = std::max(requested_max, rank);
    }
    if (requested_max >= 2 && preps >= 2) {
        bool all_constant = true;
        for (int j = 0; j < cols; ++j) {
            const double spread =
                data.freq.col(j).maxCoeff() - data.freq.col(j).minCoeff();
            if (spread > 1e-12) all_constant = false;
        }
        if (all_constant) {
            throw DegenerateData(
                "every measurement column is constant across preparations; the data "
                "carries no structure beyond rank 1");
        }
    }

    std::vector<int> ranks = rank_candidates;
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

    int chosen_rank = 0;
    double chosen_holdout = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int rank : ranks) {
        AlsRun run = best_restart(data.train_freq, data.train_weight, rank, seed, restarts,
                                  options, /*salt=*/1);
        if (!run.converged) continue;
        any_converged = true;
        const double holdout =
            (data.holdout_weight.array() *
             (data.holdout_freq - run.factorization.states * run.factorization.effects)
                 .array()
                 .square())
                .sum();
        if (holdout < chosen_holdout) {
            chosen_holdout = holdout;
            chosen_rank = rank;
        }
    }
    if (!any_converged) {
        throw NoConvergence("fit_gpt: no restart converged at any candidate rank");
    }

    AlsRun final = best_restart(data.freq, data.weight, chosen_rank, seed, restarts, options,
                                /*salt=*/2);
    if (!final.converged) {
        throw NoConvergence("fit_gpt: final refit did not converge");
    }
    for (int j = 0; j < cols; ++j) {
        project_effect_column(final.factorization.effects, final.factorization.states, j);
    }

    TomographyFit fit;
    fit.prep_ids = data.prep_ids;
    fit.measurement_labels = data.measurement_labels;
    fit.rank = chosen_rank;
    fit.training_residual = weighted_residual(final.factorization, data.freq, data.weight);
    fit.holdout_residual = chosen_holdout;
    fit.residual_history = std::move(final.history);
    fit.states.reserve(preps);
    for (int i = 0; i < preps; ++i) {
        Eigen::VectorXd coords = final.factorization.states.row(i).transpose();
        coords[0] = 1.0;
        fit.states.push_back(GptVector{GptVector::Kind::state, std::move(coords)});
    }
    fit.plus_effects.reserve(cols);
    for (int j = 0; j < cols; ++j) {
        fit.plus_effects.push_back(make_effect(final.factorization.effects.col(j)));
    }

    for (int i = 0; i < preps; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double p = fit.states[i].coords.dot(fit.plus_effects[j].coords);
            if (p < -1e-6 || p > 1.0 + 1e-6) {
                throw SolverFailure("fit_gpt: projected fit still predicts probability " +
                                    std::to_string(p));
            }
        }
    }
    return fit;
}

TomographyFit fit_gpt(const CountsTable& counts, const std::vector<int>& rank_candidates,
                      std::uint64_t seed, int restarts, const FitOptions& options) {
    return fit_gpt(frequency_data_from_counts(counts, seed, options.holdout_fraction),
                   rank_candidates, seed, restarts, options);
}

GaugeMap compute_gauge_map(const TomographyFit& fit, const std::vector<GptVector>& reference) {
    const int preps = static_cast<int>(fit.states.size());
    const int rank = fit.rank;
    if (static_cast<int>(reference.size()) != preps) {
        throw SingularMap("gauge_align: reference state count mismatch");
    }
    for (const auto& ref : reference) {
        if (ref.dim() != rank) {
            throw SingularMap("gauge_align: reference dimension differs from fit rank");
        }
    }

    Eigen::MatrixXd design(preps, rank);
    Eigen::MatrixXd target(preps, rank - 1);
    for (int i = 0; i < preps; ++i) {
        design.row(i) = fit.states[i].coords.transpose();
        target.row(i) = reference[i].coords.tail(rank - 1).transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < rank) {
        throw SingularMap("gauge_align: fitted states do not determine the map");
    }
    const Eigen::MatrixXd coeffs = qr.solve(target);  // rank x (rank-1)

    GaugeMap map;
    map.offset = coeffs.row(0).transpose();
    map.linear = coeffs.bottomRows(rank - 1).transpose();
    return map;
}

TomographyFit gauge_align(const TomographyFit& fit, const std::vector<GptVector>& reference) {
    const GaugeMap map = compute_gauge_map(fit, reference);
    const int rank = fit.rank;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(map.linear);
    if (!lu.isInvertible()) {
        throw SingularMap("gauge_align: reference states do not span; map is singular");
    }
    const Eigen::MatrixXd inv = lu.inverse();

    TomographyFit out = fit;
    for (auto& s : out.states) {
        Eigen::VectorXd y = s.coords.tail(rank - 1);
        s.coords.tail(rank - 1) = map.offset + map.linear * y;
    }
    for (auto& e : out.plus_effects) {
        Eigen::VectorXd g = e.coords.tail(rank - 1);
        const Eigen::VectorXd transformed = inv.transpose() * g;
        e.coords[0] -= transformed.dot(map.offset);
        e.coords.tail(rank - 1) = transformed;
    }
    return out;
}

void to_json(nlohmann::json& j, const TomographyFit& fit) {
    j = nlohmann::json{
        {"rank", fit.rank},
        {"prep_ids", fit.prep_ids},
        {"measurements", fit.measurement_labels},
        {"states", fit.states},
        {"plus_effects", fit.plus_effects},
        {"training_residual", fit.training_residual},
        {"holdout_residual", fit.holdout_residual},
        {"residual_history", fit.residual_history},
    };
}

void from_json(const nlohmann::json& j, TomographyFit& fit) {
    fit = TomographyFit{};
    fit.rank = j.at("rank").get<int>();
    fit.prep_ids = j.at("prep_ids").get<std::vector<std::string>>();
    fit.measurement_labels = j.at("measurements").get<std::vector<std::string>>();
    fit.states = j.at("states").get<std::vector<GptVector>>();
    fit.plus_effects = j.at("plus_effects").get<std::vector<GptVector>>();
    fit.training_residual = j.at("training_residual").get<double>();
    fit.holdout_residual = j.at("holdout_residual").get<double>();
    if (j.contains("residual_history")) {
        fit.residual_history = j.at("residual_history").get<std::vector<double>>();
    }
    for (const auto& s : fit.states) {
        if (s.dim() != fit.rank) throw ValidationError("tomography fit JSON: state rank mismatch");
    }
    for (const auto& e : fit.plus_effects) {
        if (e.dim() != fit.rank) throw ValidationError("tomography fit JSON: effect rank mismatch");
    }
}

}  // namespace dualrail
