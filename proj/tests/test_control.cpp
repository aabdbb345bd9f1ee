#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rgw/control.hpp"
#include "rgw/errors.hpp"
#include "rgw/rate.hpp"
#include "rgw/simplex.hpp"

using namespace rgw;

namespace {

const OffspringLaw kNu({1, 2}, {0.5, 0.5});
constexpr double kQ = 1.0 / 3.0;
const ProbVector kRho({1, 2}, {0.2, 0.8});

} // namespace

TEST_CASE("simplex projections") {
    auto p = project_to_simplex({0.3, 0.9, -0.2});
    CHECK(p[0] == doctest::Approx(0.2));
    CHECK(p[1] == doctest::Approx(0.8));
    CHECK(p[2] == 0.0);
    auto h = project_to_simplex_halfspace({0.5, 0.5}, {0.0, 1.0}, 0.8);
    CHECK(h[1] == doctest::Approx(0.8));
    auto same = project_to_simplex_halfspace({0.1, 0.9}, {0.0, 1.0}, 0.8);
    CHECK(same[1] == doctest::Approx(0.9));
    CHECK_THROWS_AS(project_to_simplex_halfspace({0.5, 0.5}, {0.0, 1.0}, 1.5), InfeasibleError);
}

TEST_CASE("objective of constant paths") {
    CHECK(control_objective(ControlPath::constant(kNu.as_prob_vector(), 16), kNu, kQ).value() == doctest::Approx(0.0));
    const double h = oracle::constant_control_bound(0.2, kQ);
    CHECK(std::abs(h - 0.0915162) < 1e-6);
    for (int m : {16, 64, 256}) {
        double v = control_objective(ControlPath::constant(kRho, m), kNu, kQ).value();
        CHECK(std::abs(v - h) < 1e-12); // the constant path has psi = rho at every step
    }
}

TEST_CASE("two-step path by hand") {
    ControlPath path({ProbVector::dirac({1, 2}, 2), ProbVector::dirac({1, 2}, 1)});
    // step 1: psi_{1/2} = delta_2; step 2: psi_{3/2} = (delta_2 + delta_1/2) / 1.5 = (1/3, 2/3)
    std::vector<double> m1{(1 - kQ) * 0.5, kQ + (1 - kQ) * 0.5};
    std::vector<double> m2{kQ / 3.0 + (1 - kQ) * 0.5, kQ * 2.0 / 3.0 + (1 - kQ) * 0.5};
    double expected = 0.5 * (oracle::kl({0.0, 1.0}, m1) + oracle::kl({1.0, 0.0}, m2));
    CHECK(control_objective(path, kNu, kQ).value() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(path.psi_mid(2)[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("control problem reproduces the dual rate") {
    ControlOptions opt;
    ControlResult r = solve_control(kRho, kNu, kQ, 64, opt);
    const double dual = lambda_q_star(kRho, kNu, kQ).value;
    CHECK(std::abs(r.value - dual) / dual < 0.02);
    CHECK(r.value < oracle::constant_control_bound(0.2, kQ) - 1e-3);
    CHECK(r.constraint_residual < 1e-10);
    CHECK(linf_distance(r.best_path.mean(), kRho) < 1e-9);
    CHECK(r.restart_values.size() == 8);
    // Any feasible path bounds the rate from above up to discretization error.
    CHECK(r.value > dual - 1e-3);

    ControlResult again = solve_control(kRho, kNu, kQ, 64, opt);
    CHECK(again.value == r.value);
    CHECK(std::abs(rate_by_control(kNu.as_prob_vector(), kNu, kQ, 16)) < 1e-9);
}

TEST_CASE("two-phase probe") {
    const double h = oracle::constant_control_bound(0.2, kQ);
    CHECK(std::abs(two_phase_probe(kRho, kNu, kQ, 0.0) - h) < 1e-6);
    bool below = false;
    for (double eps = 1e-3; eps < 1.0; eps *= 2.0) {
        try {
            below = below || two_phase_probe(kRho, kNu, kQ, eps) < h;
        } catch (const ContractError&) {
            break; // rho_{+-eps} left the simplex
        }
    }
    CHECK(below);
    CHECK(two_phase_probe(kNu.as_prob_vector(), kNu, kQ, 0.0) >= 0.0);
    CHECK(two_phase_probe(kNu.as_prob_vector(), kNu, kQ, 0.1) >= 0.0);
}

TEST_CASE("contracts") {
    CHECK_THROWS_AS(ControlPath({ProbVector::dirac({1, 2}, 1)}), ContractError);
    CHECK_THROWS_AS(solve_control(kRho, kNu, kQ, 1), ContractError);
    CHECK_THROWS_AS(solve_control(ProbVector({1, 3}, {0.5, 0.5}), kNu, kQ, 8), ContractError);
}
