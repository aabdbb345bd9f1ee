#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rgw/classify.hpp"
#include "rgw/errors.hpp"
#include "rgw/simulate.hpp"
#include "rgw/survival.hpp"

using namespace rgw;

namespace {

const OffspringLaw kNu({1, 2}, {0.5, 0.5});
constexpr double kQ = 1.0 / 3.0;

// |y e^y - x| relative to max(1, |x|), evaluated in long double.
double scaled_residual(double x) {
    long double y = lambert_w0(x);
    long double r = y * std::exp(y) - static_cast<long double>(x);
    return static_cast<double>(std::abs(r)) / std::max(1.0, std::abs(x));
}

} // namespace

TEST_CASE("Lambert W0 values") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(std::abs(lambert_w0(1.0) - oracle::lambert_bisection(1.0)) < 1e-9);
    CHECK(std::abs(lambert_w0(1.0) - 0.5671433) < 1e-7);
    CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(lambert_w0(-0.5), ContractError);
    CHECK_THROWS_AS(lambert_w0(NAN), ContractError);
}

TEST_CASE("Lambert W0 residuals over log-spaced points") {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double t = i / 9999.0;
        double x = -std::exp(-1.0) + std::pow(10.0, -12.0 + 18.0 * t);
        worst = std::max(worst, scaled_residual(x));
    }
    CHECK(worst < 1e-14);
    // Absolute residual where the scaled and absolute tests coincide.
    for (double x : {-0.3, -0.1, 1e-8, 0.5, 1.0}) {
        long double y = lambert_w0(x);
        CHECK(std::abs(static_cast<double>(y * std::exp(y) - x)) < 1e-14);
    }
}

TEST_CASE("J functional") {
    CHECK(J_functional({1.0, 1.0}, kNu, kQ).value() == doctest::Approx(-0.5 * std::log(2.0)));
    OffspringLaw z({0, 2}, {0.5, 0.5});
    CHECK(J_functional({0.1, 1.0}, z, 0.5).is_plus_infinity());
    CHECK_THROWS_AS(J_functional({3.0, 1.0}, kNu, kQ), ContractError);
    RealVector a{0.5, 4.0 / 3.0};
    CHECK(std::abs(J_functional(a, kNu, kQ).value() - pi_from_a(a, kNu, kQ).criterion) < 1e-12);
}

TEST_CASE("survival minimizer, flagship") {
    SurvivalReport r = solve_survival_minimizer(kNu, kQ);
    CHECK(r.survives_certified);
    CHECK(r.J_min <= -0.5 * std::log(2.0));
    CHECK(r.constraint_residual < 1e-10);
    CHECK(r.J_min <= r.J_baseline + 1e-9);
    for (std::size_t k = 0; k < r.a_opt.size(); ++k) {
        CHECK(r.a_opt[k] >= 0.0);
        CHECK(r.a_opt[k] < 1.0 / kQ);
        CHECK(r.a_opt[k] == doctest::Approx(-lambert_w0(-r.C * kNu.support()[k]) / kQ).epsilon(1e-12));
    }
    RealVector ratios = lagrange_ratios(r.a_opt, kNu, kQ);
    CHECK(std::abs(ratios[1] / ratios[0] - 1.0) < 1e-6);
    oracle::JOracleResult o = oracle::j_oracle(kNu.support(), {0.5, 0.5}, kQ);
    CHECK(std::abs(o.value - r.J_min) < 1e-6);
}

TEST_CASE("survival minimizer, degenerate and zero-atom laws") {
    SurvivalReport d1 = solve_survival_minimizer(OffspringLaw({1}, {1.0}), 0.3);
    CHECK(d1.a_opt[0] == doctest::Approx(1.0));
    CHECK(std::abs(d1.J_min) < 1e-12);
    CHECK_FALSE(d1.survives_certified);
    CHECK(d1.trivially_survives);

    ProportionalBaseline b = proportional_baseline(OffspringLaw({2}, {1.0}), 0.5);
    CHECK(b.c == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.residual < 1e-12);
    double c = b.c, q = 0.5;
    double jb = (1 - q) * (2 * c) / (1 - 2 * q * c) * std::log(2 * c / 2);
    CHECK(b.J_b == doctest::Approx(jb));
    CHECK(b.J_b == doctest::Approx(J_functional({2 * c}, OffspringLaw({2}, {1.0}), q).value()));

    OffspringLaw z({0, 2}, {0.5, 0.5});
    SurvivalReport rz = solve_survival_minimizer(z, 0.6);
    CHECK(rz.a_opt[0] == 0.0);
    CHECK_FALSE(rz.trivially_survives);
    CHECK(rz.constraint_residual < 1e-10);
    if (rz.survives_certified) {
        PopulationSummary s = summarize_population(z, 0.6, 60, 100000, 10000, RngStream(60, 0), Engine::Grouped);
        CHECK(s.survival_fraction > 0.0);
    }
    CHECK_THROWS_AS(solve_survival_minimizer(OffspringLaw({0}, {1.0}), 0.5), ContractError);
    CHECK_THROWS_AS(solve_survival_minimizer(kNu, 1.0), ContractError);
}

TEST_CASE("random laws against the projected-gradient oracle") {
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Support s;
        int atom = u(g) < 0.5 ? 0 : 1;
        int size = 2 + static_cast<int>(u(g) * 3);
        for (int k = 0; k < size; ++k) {
            s.push_back(atom);
            atom += 1 + static_cast<int>(u(g) * 3);
        }
        std::vector<double> w(s.size());
        double tot = 0.0;
        for (double& x : w) tot += (x = 0.05 + u(g));
        for (double& x : w) x /= tot;
        double q = 0.05 + 0.9 * u(g);
        OffspringLaw nu(s, w);
        SurvivalReport r = solve_survival_minimizer(nu, q);
        CHECK(r.constraint_residual < 1e-10);
        CHECK(r.J_min <= r.J_baseline + 1e-9);
        RealVector ratios = lagrange_ratios(r.a_opt, nu, q);
        for (double x : ratios) CHECK(std::abs(x / ratios.front() - 1.0) < 1e-6);
        oracle::JOracleResult o = oracle::j_oracle(s, w, q, 16, 100 + t);
        CHECK(std::abs(o.value - r.J_min) < 1e-6);
    }
}
