#include "dualrail/secondary.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "dualrail/simplex.hpp"

namespace dualrail {

namespace {

// LP for one sign sector (sm, sp) of the first secondary state.
//
// Variables: W (4 x n, row-major) then two sector slacks.  Constraints:
//   row-stochasticity        sum_j W(k,j) = 1                     (4 rows)
//   sign pattern             A1=A2=-A3=-A4, B1=-B2=-B3=B4         (6 rows)
//   equal-mixture identity   sum_j (W1j+W3j-W2j-W4j) s_j = 0      (d-1 rows)
//   sector                   sm*A1 - slack_m = 0, sp*B1 - slack_p = 0
// with A_k = sum_j W(k,j) a_j, B_k = sum_j W(k,j) b_j.  Objective:
// maximize sm*A1 + sp*B1, which equals |A1| + |B1| inside the sector.
LinearProgram<double> build_sector_lp(const Eigen::MatrixXd& states_nonunit,
                                      const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                      int sm, int sp) {
    const int n = static_cast<int>(a.size());
    const int coords = static_cast<int>(states_nonunit.rows());
    const int cols = 4 * n + 2;
    const int rows = 4 + 6 + coords + 2;
    auto lp = LinearProgram<double>::zero(rows, cols);
    auto w = [n](int k, int j) { return k * n + j; };

    int row = 0;
    for (int k = 0; k < 4; ++k, ++row) {
        for (int j = 0; j < n; ++j) lp.at(row, w(k, j)) = 1.0;
        lp.b[row] = 1.0;
    }

    const std::array<std::pair<int, int>, 3> a_pattern = {{{1, -1}, {2, 1}, {3, 1}}};
    for (const auto& [k, sign] : a_pattern) {
        for (int j = 0; j < n; ++j) {
            lp.at(row, w(0, j)) += a[j];
            lp.at(row, w(k, j)) += sign * a[j];
        }
        ++row;
    }
    const std::array<std::pair<int, int>, 3> b_pattern = {{{1, 1}, {2, 1}, {3, -1}}};
    for (const auto& [k, sign] : b_pattern) {
        for (int j = 0; j < n; ++j) {
            lp.at(row, w(0, j)) += b[j];
            lp.at(row, w(k, j)) += sign * b[j];
        }
        ++row;
    }

    for (int c = 0; c < coords; ++c, ++row) {
        for (int j = 0; j < n; ++j) {
            const double v = states_nonunit(c, j);
            lp.at(row, w(0, j)) += v;
            lp.at(row, w(2, j)) += v;
            lp.at(row, w(1, j)) -= v;
            lp.at(row, w(3, j)) -= v;
        }
    }

    for (int j = 0; j < n; ++j) lp.at(row, w(0, j)) = sm * a[j];
    lp.at(row, 4 * n) = -1.0;
    ++row;
    for (int j = 0; j < n; ++j) lp.at(row, w(0, j)) = sp * b[j];
    lp.at(row, 4 * n + 1) = -1.0;

    for (int j = 0; j < n; ++j) {
        lp.c[w(0, j)] = sm * a[j] + sp * b[j];
    }
    return lp;
}

}  // namespace

SecondaryQuadruple find_secondary_quadruple(const std::vector<GptVector>& realized,
                                            const BinaryMeasurement& m,
                                            const BinaryMeasurement& m_prime, double tol) {
    if (realized.empty()) throw ValidationError("find_secondary_quadruple: no realized states");
    const int dim = realized[0].dim();
    if (m.dim() != dim || m_prime.dim() != dim) {
        throw DimensionMismatch("find_secondary_quadruple: measurement dimension mismatch");
    }
    const int n = static_cast<int>(realized.size());
    Eigen::MatrixXd nonunit(dim - 1, n);
    Eigen::VectorXd a(n), b(n);
    for (int j = 0; j < n; ++j) {
        if (!realized[j].is_state()) throw KindMismatch("realized vectors must be states");
        if (realized[j].dim() != dim) {
            throw DimensionMismatch("find_secondary_quadruple: mixed state dimensions");
        }
        nonunit.col(j) = realized[j].coords.tail(dim - 1);
        a[j] = expectation(realized[j], m);
        b[j] = expectation(realized[j], m_prime);
    }

    // All four sign sectors are solved; ties keep the earliest trial, and the
    // sector of the first realized state is tried first so an input that is
    // already an exact orbit comes back unchanged.
    std::vector<std::pair<int, int>> sectors = {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};
    const std::pair<int, int> own{a[0] >= 0.0 ? +1 : -1, b[0] >= 0.0 ? +1 : -1};
    std::stable_partition(sectors.begin(), sectors.end(),
                          [&own](const auto& s) { return s == own; });

    SimplexSolver<double> solver{tol};
    double best_value = -1.0;
    Eigen::MatrixXd best_weights;
    bool found = false;
    for (const auto& [sm, sp] : sectors) {
        const auto lp = build_sector_lp(nonunit, a, b, sm, sp);
        const auto sol = solver.solve(lp);
        if (sol.status != LpStatus::optimal) continue;
        if (!found || sol.objective > best_value + 1e-12) {
            found = true;
            best_value = sol.objective;
            best_weights.resize(4, n);
            for (int k = 0; k < 4; ++k) {
                for (int j = 0; j < n; ++j) best_weights(k, j) = sol.x[k * n + j];
            }
        }
    }
    if (!found) {
        throw InfeasibleOrbit("the realized hull admits no orbit quadruple");
    }

    SecondaryQuadruple result;
    result.weights = best_weights;
    result.witness = best_value;
    result.nc_margin = 1.0 - best_value;
    for (int k = 0; k < 4; ++k) {
        Eigen::VectorXd coords(dim);
        coords[0] = 1.0;
        coords.tail(dim - 1) = nonunit * best_weights.row(k).transpose();
        result.quadruple.states[k] = GptVector{GptVector::Kind::state, std::move(coords)};
    }
    result.quadruple.m = m;
    result.quadruple.m_prime = m_prime;

    const OrbitReport report = check_orbit(result.quadruple, std::max(tol, 1e-9));
    if (!report.pass) {
        throw SolverFailure("secondary quadruple violates the orbit conditions (residuals " +
                            std::to_string(report.symmetry_residual) + ", " +
                            std::to_string(report.equivalence_residual) + ")");
    }
    return result;
}

WitnessReport witness_report(const SecondaryQuadruple& q, double tol) {
    WitnessReport report;
    const GptVector& t1 = q.quadruple.states[0];
    report.distinguishability = predictability(t1, q.quadruple.m);
    report.visibility = predictability(t1, q.quadruple.m_prime);
    report.witness = report.visibility + report.distinguishability;
    report.nc_margin = 1.0 - report.witness;
    report.quantum_margin = 1.0 - (report.visibility * report.visibility +
                                   report.distinguishability * report.distinguishability);
    report.orbit = check_orbit(q.quadruple, std::max(tol, 1e-9));
    report.feasibility = nc_model_feasibility(q.quadruple, tol);
    if (report.witness > 1.0 + tol) {
        report.consistent = !report.feasibility.feasible;
    } else if (report.witness < 1.0 - tol) {
        report.consistent = report.feasibility.feasible;
    } else {
        report.consistent = true;  // inside the tolerance band
    }
    return report;
}

void to_json(nlohmann::json& j, const SecondaryQuadruple& q) {
    std::vector<std::vector<double>> weights(4);
    for (int k = 0; k < 4; ++k) {
        weights[k].assign(q.weights.row(k).begin(), q.weights.row(k).end());
    }
    j = nlohmann::json{
        {"weights", weights},
        {"quadruple", q.quadruple},
        {"witness", q.witness},
        {"nc_margin", q.nc_margin},
    };
}

void to_json(nlohmann::json& j, const WitnessReport& r) {
    j = nlohmann::json{
        {"visibility", r.visibility},
        {"distinguishability", r.distinguishability},
        {"witness", r.witness},
        {"nc_margin", r.nc_margin},
        {"quantum_margin", r.quantum_margin},
        {"orbit", r.orbit},
        {"feasibility", r.feasibility},
        {"consistent", r.consistent},
    };
}

}  // namespace dualrail
