#include "dualrail/counts.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace dualrail {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

CountsTable sample_counts(const std::vector<GptVector>& preps,
                          const std::vector<BinaryMeasurement>& measurements,
                          std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw ValidationError("sample_counts: shots must be >= 1");
    if (preps.empty() || measurements.empty()) {
        throw ValidationError("sample_counts: need at least one prep and one measurement");
    }
    CountsTable table;
    table.shots = shots;
    table.prep_ids.reserve(preps.size());
    for (size_t i = 0; i < preps.size(); ++i) table.prep_ids.push_back("s" + std::to_string(i + 1));
    for (const auto& m : measurements) table.measurement_labels.push_back(m.label);
    table.plus_counts.resize(static_cast<int>(preps.size()), static_cast<int>(measurements.size()));

    for (size_t i = 0; i < preps.size(); ++i) {
        for (size_t j = 0; j < measurements.size(); ++j) {
            const double p = probability(preps[i], measurements[j].plus_effect);
            const std::uint64_t cell = i * measurements.size() + j;
            std::mt19937_64 rng(seed ^ cell);
            std::int64_t hits = 0;
            for (std::int64_t k = 0; k < shots; ++k) {
                if (uniform01(rng) < p) ++hits;
            }
            table.plus_counts(static_cast<int>(i), static_cast<int>(j)) =
                static_cast<int>(hits);
        }
    }
    return table;
}

void write_counts_csv(const CountsTable& table, std::ostream& out) {
    out << "prep_id,measurement,outcome,count,shots\n";
    for (int i = 0; i < table.num_preps(); ++i) {
        for (int j = 0; j < table.num_measurements(); ++j) {
            const std::int64_t plus = table.plus_counts(i, j);
            out << table.prep_ids[i] << ',' << table.measurement_labels[j] << ",+1," << plus
                << ',' << table.shots << '\n';
            out << table.prep_ids[i] << ',' << table.measurement_labels[j] << ",-1,"
                << (table.shots - plus) << ',' << table.shots << '\n';
        }
    }
}

CountsTable read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("counts CSV is empty");
    if (line != "prep_id,measurement,outcome,count,shots") {
        throw ValidationError("counts CSV header mismatch: " + line);
    }
    CountsTable table;
    std::vector<std::string>& preps = table.prep_ids;
    std::vector<std::string>& meas = table.measurement_labels;
    struct Cell {
        std::int64_t plus = -1;
        std::int64_t minus = -1;
    };
    std::vector<std::vector<Cell>> cells;

    auto index_of = [](std::vector<std::string>& v, const std::string& s) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] == s) return static_cast<int>(i);
        }
        v.push_back(s);
        return static_cast<int>(v.size() - 1);
    };

    std::int64_t shots = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw ValidationError("counts CSV row needs 5 fields: " + line);
        const int pi = index_of(preps, f[0]);
        const int mj = index_of(meas, f[1]);
        std::int64_t count = 0, row_shots = 0;
        auto parse = [&line](const std::string& s, std::int64_t& out_val) {
            auto res = std::from_chars(s.data(), s.data() + s.size(), out_val);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
                throw ValidationError("counts CSV: bad integer in row: " + line);
            }
        };
        parse(f[3], count);
        parse(f[4], row_shots);
        if (count < 0 || row_shots < 1) throw ValidationError("counts CSV: negative count or bad shots");
        if (shots < 0) shots = row_shots;
        if (row_shots != shots) throw ValidationError("counts CSV: shots must be uniform");
        cells.resize(preps.size());
        for (auto& row : cells) row.resize(meas.size());
        if (f[2] == "+1") {
            cells[pi][mj].plus = count;
        } else if (f[2] == "-1") {
            cells[pi][mj].minus = count;
        } else {
            throw ValidationError("counts CSV: outcome must be +1 or -1");
        }
    }
    if (preps.empty()) throw ValidationError("counts CSV has no data rows");
    table.shots = shots;
    table.plus_counts.resize(static_cast<int>(preps.size()), static_cast<int>(meas.size()));
    for (size_t i = 0; i < preps.size(); ++i) {
        for (size_t j = 0; j < meas.size(); ++j) {
            const Cell& c = cells[i][j];
            if (c.plus < 0 || c.minus < 0) {
                throw ValidationError("counts CSV: missing outcome row for " + preps[i] + "," +
                                      meas[j]);
            }
            if (c.plus + c.minus != shots) {
                throw ValidationError("counts CSV: outcome counts do not sum to shots for " +
                                      preps[i] + "," + meas[j]);
            }
            table.plus_counts(static_cast<int>(i), static_cast<int>(j)) =
                static_cast<int>(c.plus);
        }
    }
    return table;
}

void to_json(nlohmann::json& j, const CountsTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < table.num_preps(); ++i) {
        for (int m = 0; m < table.num_measurements(); ++m) {
            rows.push_back({
                {"prep_id", table.prep_ids[i]},
                {"measurement", table.measurement_labels[m]},
                {"plus", table.plus_counts(i, m)},
                {"minus", table.shots - table.plus_counts(i, m)},
            });
        }
    }
    j = nlohmann::json{{"shots", table.shots}, {"cells", rows}};
}

void from_json(const nlohmann::json& j, CountsTable& table) {
    table = CountsTable{};
    table.shots = j.at("shots").get<std::int64_t>();
    std::vector<std::vector<std::int64_t>> plus;
    auto index_of = [](std::vector<std::string>& v, const std::string& s) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] == s) return static_cast<int>(i);
        }
        v.push_back(s);
        return static_cast<int>(v.size() - 1);
    };
    for (const auto& cell : j.at("cells")) {
        const int pi = index_of(table.prep_ids, cell.at("prep_id").get<std::string>());
        const int mj = index_of(table.measurement_labels, cell.at("measurement").get<std::string>());
        plus.resize(table.prep_ids.size());
        for (auto& row : plus) row.resize(table.measurement_labels.size(), -1);
        plus[pi][mj] = cell.at("plus").get<std::int64_t>();
        const auto minus = cell.at("minus").get<std::int64_t>();
        if (plus[pi][mj] + minus != table.shots) {
            throw ValidationError("counts JSON: outcome counts do not sum to shots");
        }
    }
    table.plus_counts.resize(static_cast<int>(table.prep_ids.size()),
                             static_cast<int>(table.measurement_labels.size()));
    for (size_t i = 0; i < plus.size(); ++i) {
        for (size_t m = 0; m < plus[i].size(); ++m) {
            if (plus[i][m] < 0) throw ValidationError("counts JSON: missing cell");
            table.plus_counts(static_cast<int>(i), static_cast<int>(m)) =
                static_cast<int>(plus[i][m]);
        }
    }
}

}  // namespace dualrail
