#include "dualrail/ontic.hpp"

#include <nlohmann/json.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <functional>

#include "dualrail/interferometer.hpp"
#include "dualrail/orbit.hpp"
#include "dualrail/simplex.hpp"

namespace dualrail {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Assignment a in {0,1,2,3}: M = +1 for a in {0,1}, M' = +1 for a in {0,2}.
int m_sign(int assignment) { return assignment < 2 ? 1 : -1; }
int mp_sign(int assignment) { return assignment % 2 == 0 ? 1 : -1; }

const char* kLambdaNames[4] = {"++", "+-", "-+", "--"};

struct OrbitExpectations {
    std::array<double, 4> m;
    std::array<double, 4> mp;
};

OrbitExpectations expectations_of(const OrbitQuadruple& q) {
    OrbitExpectations e{};
    for (int i = 0; i < 4; ++i) {
        e.m[i] = expectation(q.states[i], q.m);
        e.mp[i] = expectation(q.states[i], q.m_prime);
    }
    return e;
}

// Rows: 4 normalization, 4 <M> reproduction, 4 <M'> reproduction, then one
// preparation-noncontextuality row per ontic state.  Columns: mu_i(lambda),
// i-major.
template <typename Scalar>
LinearProgram<Scalar> build_feasibility_lp(const OrbitExpectations& e, int copies) {
    const int num_lambda = 4 * copies;
    const int cols = 4 * num_lambda;
    const int rows = 12 + num_lambda;
    auto lp = LinearProgram<Scalar>::zero(rows, cols);
    auto var = [num_lambda](int prep, int lambda) { return prep * num_lambda + lambda; };

    for (int i = 0; i < 4; ++i) {
        for (int l = 0; l < num_lambda; ++l) {
            const int a = l % 4;
            lp.at(i, var(i, l)) = Scalar(1);
            lp.at(4 + i, var(i, l)) = Scalar(m_sign(a));
            lp.at(8 + i, var(i, l)) = Scalar(mp_sign(a));
        }
        lp.b[i] = Scalar(1);
        lp.b[4 + i] = Scalar(e.m[i]);
        lp.b[8 + i] = Scalar(e.mp[i]);
    }
    for (int l = 0; l < num_lambda; ++l) {
        lp.at(12 + l, var(0, l)) = Scalar(1);
        lp.at(12 + l, var(2, l)) = Scalar(1);
        lp.at(12 + l, var(1, l)) = Scalar(-1);
        lp.at(12 + l, var(3, l)) = Scalar(-1);
    }
    return lp;
}

// max t subject to mu_i(lambda) >= t and the feasibility constraints; the
// optimum measures how interior the feasible set is.
LinearProgram<double> build_interior_lp(const OrbitExpectations& e, int copies) {
    const auto base = build_feasibility_lp<double>(e, copies);
    const int num_mu = static_cast<int>(base.cols);
    const int t_col = num_mu;
    // columns: mu, t, one slack per mu
    auto lp = LinearProgram<double>::zero(base.rows + num_mu, num_mu + 1 + num_mu);
    for (std::size_t i = 0; i < base.rows; ++i) {
        for (int j = 0; j < num_mu; ++j) lp.at(i, j) = base.at(i, j);
        lp.b[i] = base.b[i];
    }
    for (int j = 0; j < num_mu; ++j) {
        const std::size_t row = base.rows + j;
        lp.at(row, j) = 1.0;
        lp.at(row, t_col) = -1.0;
        lp.at(row, t_col + 1 + j) = -1.0;
    }
    lp.c[t_col] = 1.0;
    return lp;
}

OnticModel model_from_mu(const Eigen::MatrixXd& mu, int copies) {
    const int num_lambda = 4 * copies;
    OnticModel model;
    model.mu = mu;
    model.xi.resize(4, num_lambda);
    model.effect_labels = {"M+", "M-", "M'+", "M'-"};
    model.lambda_labels.reserve(num_lambda);
    for (int l = 0; l < num_lambda; ++l) {
        const int a = l % 4;
        std::string label = kLambdaNames[a];
        if (copies > 1) label += "#" + std::to_string(l / 4);
        model.lambda_labels.push_back(label);
        model.xi(0, l) = m_sign(a) > 0 ? 1.0 : 0.0;
        model.xi(1, l) = m_sign(a) > 0 ? 0.0 : 1.0;
        model.xi(2, l) = mp_sign(a) > 0 ? 1.0 : 0.0;
        model.xi(3, l) = mp_sign(a) > 0 ? 0.0 : 1.0;
    }
    return model;
}

double certificate_violation(const LinearProgram<double>& lp, const Eigen::VectorXd& y) {
    // Any candidate solution satisfies 0 <= x <= 1 (normalization rows), so
    // y.b > sum_j max(0, (y.A)_j) contradicts y.b = y.A x.
    double yb = 0.0;
    for (std::size_t i = 0; i < lp.rows; ++i) yb += y[static_cast<int>(i)] * lp.b[i];
    double reach = 0.0;
    for (std::size_t j = 0; j < lp.cols; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < lp.rows; ++i) col += y[static_cast<int>(i)] * lp.at(i, j);
        reach += std::max(0.0, col);
    }
    return yb - reach;
}

struct ExactVerdict {
    bool feasible;
    Eigen::MatrixXd mu;       // when feasible
    Eigen::VectorXd farkas;   // when infeasible
};

ExactVerdict solve_exact(const OrbitExpectations& e, int copies) {
    auto lp = build_feasibility_lp<Rational>(e, copies);
    // Expectations are doubles, hence exactly representable dyadic rationals:
    // the rational LP is the same LP, not an approximation.
    SimplexSolver<Rational> solver{Rational(0)};
    const auto sol = solver.solve(lp);
    ExactVerdict verdict;
    verdict.feasible = sol.status != LpStatus::infeasible;
    if (verdict.feasible) {
        const int num_lambda = 4 * copies;
        verdict.mu.resize(4, num_lambda);
        for (int i = 0; i < 4; ++i) {
            for (int l = 0; l < num_lambda; ++l) {
                verdict.mu(i, l) = static_cast<double>(sol.x[i * num_lambda + l]);
            }
        }
    } else {
        verdict.farkas.resize(static_cast<int>(sol.farkas.size()));
        for (size_t i = 0; i < sol.farkas.size(); ++i) {
            verdict.farkas[static_cast<int>(i)] = static_cast<double>(sol.farkas[i]);
        }
    }
    return verdict;
}

}  // namespace

FeasibilityResult nc_model_feasibility(const OrbitQuadruple& q, double tol,
                                       const NcOptions& options) {
    if (tol <= 0.0) throw ValidationError("nc_model_feasibility: tol must be positive");
    if (options.lambda_copies < 1) throw ValidationError("lambda_copies must be >= 1");
    const double orbit_tol = std::max(tol, 1e-9);
    const OrbitReport orbit = check_orbit(q, orbit_tol);
    if (!orbit.pass) {
        throw OrbitInvalid("quadruple fails the orbit conditions (symmetry " +
                           std::to_string(orbit.symmetry_residual) + ", equivalence " +
                           std::to_string(orbit.equivalence_residual) + ")");
    }

    const auto e = expectations_of(q);
    const int copies = options.lambda_copies;
    const auto lp = build_feasibility_lp<double>(e, copies);
    SimplexSolver<double> solver{tol};
    const auto sol = solver.solve(lp);

    FeasibilityResult result;
    result.tol = tol;
    bool feasible = sol.status != LpStatus::infeasible;

    // Distance-to-boundary estimate; exact re-solve near the boundary.
    double nearness;
    if (feasible) {
        SimplexSolver<double> interior_solver{tol};
        const auto interior = interior_solver.solve(build_interior_lp(e, copies));
        nearness = interior.status == LpStatus::optimal ? interior.objective : 0.0;
    } else {
        nearness = sol.infeasibility;
    }

    Eigen::MatrixXd mu;
    Eigen::VectorXd farkas;
    if (nearness < 1000.0 * tol) {
        const auto exact = solve_exact(e, copies);
        feasible = exact.feasible;
        result.resolved_exactly = true;
        if (feasible) {
            mu = exact.mu;
        } else {
            farkas = exact.farkas;
        }
    } else if (feasible) {
        const int num_lambda = 4 * copies;
        mu.resize(4, num_lambda);
        for (int i = 0; i < 4; ++i) {
            for (int l = 0; l < num_lambda; ++l) mu(i, l) = sol.x[i * num_lambda + l];
        }
    } else {
        farkas.resize(static_cast<int>(sol.farkas.size()));
        for (size_t i = 0; i < sol.farkas.size(); ++i) {
            farkas[static_cast<int>(i)] = sol.farkas[i];
        }
    }

    result.feasible = feasible;
    if (feasible) {
        OnticModel model = model_from_mu(mu, copies);
        if (!verify_model(model, q, std::max(100.0 * tol, 1e-7))) {
            throw SolverFailure("feasible LP solution failed independent model verification");
        }
        result.model = std::move(model);
    } else {
        InfeasibilityCertificate cert;
        cert.dual = farkas;
        cert.violation = certificate_violation(lp, farkas);
        cert.description =
            "nonnegative contraction of the normalization, reproduction and "
            "noncontextuality rows exceeds the reach of the unit box by " +
            std::to_string(cert.violation);
        if (cert.violation <= 0.0) {
            throw SolverFailure("infeasibility certificate failed verification");
        }
        result.certificate = std::move(cert);
    }
    return result;
}

bool verify_model(const OnticModel& model, const OrbitQuadruple& q, double tol) {
    const int num_lambda = static_cast<int>(model.lambda_labels.size());
    if (model.mu.rows() != 4 || model.mu.cols() != num_lambda) return false;
    if (model.xi.rows() != 4 || model.xi.cols() != num_lambda) return false;

    if (model.mu.minCoeff() < -tol) return false;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(model.mu.row(i).sum() - 1.0) > tol) return false;
    }
    if (model.xi.minCoeff() < -tol || model.xi.maxCoeff() > 1.0 + tol) return false;
    for (int l = 0; l < num_lambda; ++l) {
        if (std::abs(model.xi(0, l) + model.xi(1, l) - 1.0) > tol) return false;
        if (std::abs(model.xi(2, l) + model.xi(3, l) - 1.0) > tol) return false;
    }

    const std::array<const GptVector*, 4> effects = {&q.m.plus_effect, &q.m.minus_effect,
                                                     &q.m_prime.plus_effect,
                                                     &q.m_prime.minus_effect};
    for (int i = 0; i < 4; ++i) {
        for (int e = 0; e < 4; ++e) {
            const double predicted = model.xi.row(e).dot(model.mu.row(i));
            const double operational = probability(q.states[i], *effects[e]);
            if (std::abs(predicted - operational) > tol) return false;
        }
    }
    return true;
}

double verify_certificate(const InfeasibilityCertificate& cert, const OrbitQuadruple& q,
                          int lambda_copies) {
    const auto lp = build_feasibility_lp<double>(expectations_of(q), lambda_copies);
    if (cert.dual.size() != static_cast<int>(lp.rows)) {
        throw DimensionMismatch("certificate has wrong number of multipliers");
    }
    return certificate_violation(lp, cert.dual);
}

namespace {

BoundarySweep sweep_boundary(int grid, const std::function<bool(double)>& feasible_at) {
    if (grid < 2) throw ValidationError("boundary sweep: grid must be >= 2");
    BoundarySweep sweep;
    sweep.points.reserve(grid);
    for (int k = 0; k < grid; ++k) {
        const double p = static_cast<double>(k) / (grid - 1);
        sweep.points.push_back(BoundaryPoint{p, feasible_at(p)});
    }
    for (int k = 1; k < grid; ++k) {
        if (sweep.points[k].feasible != sweep.points[k - 1].feasible) {
            sweep.transitions.push_back(
                0.5 * (sweep.points[k].parameter + sweep.points[k - 1].parameter));
        }
    }
    return sweep;
}

}  // namespace

BoundarySweep sweep_noise_boundary(double reflectivity, int grid, double tol) {
    const OrbitQuadruple ideal = orbit_preparations(reflectivity);
    return sweep_boundary(grid, [&](double p) {
        const OrbitQuadruple noisy = apply_noise(ideal, make_noise(p));
        return nc_model_feasibility(noisy, tol).feasible;
    });
}

BoundarySweep sweep_reflectivity_boundary(double depolarizing, int grid, double tol) {
    const NoiseModel noise = make_noise(depolarizing);
    return sweep_boundary(grid, [&](double r) {
        const OrbitQuadruple noisy = apply_noise(orbit_preparations(r), noise);
        return nc_model_feasibility(noisy, tol).feasible;
    });
}

void to_json(nlohmann::json& j, const OnticModel& m) {
    std::vector<std::vector<double>> mu(4), xi(4);
    for (int i = 0; i < 4; ++i) {
        mu[i].assign(m.mu.row(i).begin(), m.mu.row(i).end());
        xi[i].assign(m.xi.row(i).begin(), m.xi.row(i).end());
    }
    j = nlohmann::json{
        {"lambda", m.lambda_labels},
        {"mu", mu},
        {"xi", xi},
        {"effects", m.effect_labels},
    };
}

void to_json(nlohmann::json& j, const FeasibilityResult& r) {
    j = nlohmann::json{
        {"status", r.feasible ? "feasible" : "infeasible"},
        {"tolerance", r.tol},
        {"resolved_exactly", r.resolved_exactly},
    };
    if (r.model) j["model"] = *r.model;
    if (r.certificate) {
        j["certificate"] = nlohmann::json{
            {"dual", std::vector<double>(r.certificate->dual.begin(), r.certificate->dual.end())},
            {"violation", r.certificate->violation},
            {"description", r.certificate->description},
        };
    }
}

void to_json(nlohmann::json& j, const BoundarySweep& s) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& pt : s.points) {
        points.push_back({{"parameter", pt.parameter}, {"feasible", pt.feasible}});
    }
    j = nlohmann::json{{"points", points}, {"transitions", s.transitions}};
}

}  // namespace dualrail
