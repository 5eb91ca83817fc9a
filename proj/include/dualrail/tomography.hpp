#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "dualrail/counts.hpp"
#include "dualrail/gpt.hpp"

namespace dualrail {

/// Frequency table for the fit: one column per measurement holding the +1
/// relative frequency, with per-cell least-squares weights.  Produced from a
/// CountsTable, or directly from exact probabilities for infinite-shot
/// studies.
struct FrequencyData {
    std::vector<std::string> prep_ids;
    std::vector<std::string> measurement_labels;

    // Full-data frequencies and weights (all shots); the final refit uses
    // these.
    Eigen::MatrixXd freq;
    Eigen::MatrixXd weight;

    // Disjoint training/holdout split for rank selection.  For counts input
    // the split subsamples the shots of every cell (deterministic from the
    // seed), so each cell keeps training data; for exact input all three
    // views coincide.
    Eigen::MatrixXd train_freq;
    Eigen::MatrixXd train_weight;
    Eigen::MatrixXd holdout_freq;
    Eigen::MatrixXd holdout_weight;

    int num_preps() const { return static_cast<int>(prep_ids.size()); }
    int num_measurements() const { return static_cast<int>(measurement_labels.size()); }
};

/// Binomial weights w = shots / (f(1-f) + 1/shots), with the training and
/// holdout rows drawn from a deterministic seeded split of each cell's shots.
FrequencyData frequency_data_from_counts(const CountsTable& counts, std::uint64_t seed,
                                         double holdout_fraction = 0.2);

/// Exact probabilities; unit weights; holdout mirrors the training data.
FrequencyData frequency_data_from_probabilities(const std::vector<std::string>& prep_ids,
                                                const std::vector<std::string>& measurement_labels,
                                                const Eigen::MatrixXd& probabilities);

struct TomographyFit {
    std::vector<std::string> prep_ids;
    std::vector<std::string> measurement_labels;
    std::vector<GptVector> states;            // unit coordinate fixed to 1
    std::vector<GptVector> plus_effects;      // one per measurement
    int rank = 0;
    double training_residual = 0.0;
    double holdout_residual = 0.0;
    // Training residual after each alternating-minimization sweep of the
    // final fit; non-increasing by construction.
    std::vector<double> residual_history;

    GptVector unit() const { return unit_effect(rank); }
    BinaryMeasurement measurement(int index) const;
    int measurement_index(const std::string& label) const;
    /// <M_j> of fitted state i under the fitted effects (gauge invariant).
    double fitted_expectation(int prep, int meas) const;
};

struct FitOptions {
    int max_iterations = 500;
    double relative_tol = 1e-13;
    double holdout_fraction = 0.2;
};

/// Theory-agnostic fit of states and effects to the frequency table by
/// alternating weighted least squares, one rank per candidate, rank chosen
/// by holdout residual (ties to the smaller rank), final refit on the full
/// data.  Gauge: the unit effect is the first basis vector and every state
/// has first coordinate 1.
TomographyFit fit_gpt(const FrequencyData& data, const std::vector<int>& rank_candidates,
                      std::uint64_t seed, int restarts, const FitOptions& options = {});

TomographyFit fit_gpt(const CountsTable& counts, const std::vector<int>& rank_candidates,
                      std::uint64_t seed, int restarts, const FitOptions& options = {});

/// The gauge freedom of a fit is an invertible map fixing the unit effect.
/// On states it acts affinely on the non-unit coordinates.
struct GaugeMap {
    Eigen::VectorXd offset;
    Eigen::MatrixXd linear;
};

GaugeMap compute_gauge_map(const TomographyFit& fit, const std::vector<GptVector>& reference);

/// Applies the least-squares gauge map onto the reference states, adjusting
/// the effects contragradiently so every predicted probability is unchanged.
TomographyFit gauge_align(const TomographyFit& fit, const std::vector<GptVector>& reference);

void to_json(nlohmann::json& j, const TomographyFit& fit);
void from_json(const nlohmann::json& j, TomographyFit& fit);

}  // namespace dualrail
