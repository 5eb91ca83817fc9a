#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dualrail/gpt.hpp"

namespace dualrail {

/// Outcome counts per (preparation, measurement) cell.  Only the +1 count is
/// stored; the -1 count is shots - plus.  All cells share the same number of
/// shots.
struct CountsTable {
    std::vector<std::string> prep_ids;
    std::vector<std::string> measurement_labels;
    // plus_counts(i, j) = number of +1 outcomes for prep i under measurement j.
    Eigen::MatrixXi plus_counts;
    std::int64_t shots = 0;

    int num_preps() const { return static_cast<int>(prep_ids.size()); }
    int num_measurements() const { return static_cast<int>(measurement_labels.size()); }
    double frequency(int prep, int meas) const {
        return static_cast<double>(plus_counts(prep, meas)) / static_cast<double>(shots);
    }
};

/// Samples every (prep, measurement) cell from the binomial law with success
/// probability probability(s, plus_effect).
///
/// Reproducibility contract: the per-cell stream is std::mt19937_64 seeded
/// with (seed XOR cell_index), cell_index = prep * num_measurements + meas;
/// each shot consumes one engine output mapped to [0,1) as (x >> 11) * 2^-53.
/// Both the engine and the mapping are fully specified, so identical inputs
/// give identical tables on any platform.
CountsTable sample_counts(const std::vector<GptVector>& preps,
                          const std::vector<BinaryMeasurement>& measurements,
                          std::int64_t shots, std::uint64_t seed);

/// CSV with header prep_id,measurement,outcome,count,shots; one row per
/// outcome, prep-major, +1 before -1.
void write_counts_csv(const CountsTable& table, std::ostream& out);
CountsTable read_counts_csv(std::istream& in);

void to_json(nlohmann::json& j, const CountsTable& table);
void from_json(const nlohmann::json& j, CountsTable& table);

}  // namespace dualrail
