#include "rgw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rgw/classify.hpp"
#include "rgw/control.hpp"
#include "rgw/errors.hpp"
#include "rgw/rate.hpp"
#include "rgw/simulate.hpp"
#include "rgw/survival.hpp"

namespace rgw {

namespace {

// Flagship model: nu uniform on {1,2}, q = 1/3, where Lambda and its transform are explicit.
const OffspringLaw& flagship() {
    static const OffspringLaw nu({1, 2}, {0.5, 0.5});
    return nu;
}
constexpr double kQ = 1.0 / 3.0;

double flagship_lambda(double x, double y) {
    if (x > y) std::swap(x, y);
    return std::log(2.0) + y - std::log(3.0 - std::exp(x - y));
}

double flagship_rate(double p) {
    if (p > 0.5) p = 1.0 - p;
    if (p == 0.0) return std::log(1.5);
    return p * std::log(3.0 * p / (p + 1.0)) - std::log(2.0) + std::log(3.0 / (p + 1.0));
}

struct Runner {
    VerifyReport& report;

    // Records observed <= tolerance (or the supplied predicate); exceptions count as failures.
    void check(const std::string& name, double tolerance, const std::function<double()>& body,
               const std::function<bool(double, double)>& ok = [](double obs, double tol) { return obs <= tol; }) {
        VerifyCheck c{name, tolerance, 0.0, false};
        try {
            c.observed = body();
            c.passed = std::isfinite(c.observed) && ok(c.observed, tolerance);
        } catch (const std::exception&) {
            c.observed = std::nan("");
            c.passed = false;
        }
        report.checks.push_back(c);
    }
};

double z_score(double a, double b, double se) { return se > 0.0 ? std::abs(a - b) / se : (a == b ? 0.0 : 1e300); }

} // namespace

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json j;
    j["level"] = level == VerifyLevel::Quick ? "quick" : "full";
    j["seed"] = seed;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["tolerance"] = c.tolerance;
        e["observed"] = std::isfinite(c.observed) ? nlohmann::json(c.observed) : nlohmann::json(nullptr);
        e["passed"] = c.passed;
        j["checks"].push_back(e);
    }
    j["passed"] = passed();
    return j;
}

VerifyReport verify_suite(VerifyLevel level, std::uint64_t seed) {
    VerifyReport rep;
    rep.level = level;
    rep.seed = seed;
    Runner run{rep};
    const bool full = level == VerifyLevel::Full;
    const OffspringLaw& nu = flagship();
    const RngStream root(seed, 0x766572696679ull);
    QuadratureSpec adaptive;
    adaptive.polynomial_fast_path = false;

    run.check("lambda_q_closed_form_grid", 1e-8, [&] {
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                double x = -2.0 + 0.2 * i;
                double y = -2.0 + 0.2 * j;
                worst = std::max(worst, std::abs(lambda_q(LogWeights({1, 2}, {x, y}), nu, kQ, adaptive) - flagship_lambda(x, y)));
            }
        return worst;
    });
    run.check("lambda_q_star_closed_form", 1e-6, [&] {
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            double p = 0.05 * i;
            worst = std::max(worst, std::abs(lambda_q_star(ProbVector({1, 2}, {p, 1.0 - p}), nu, kQ, adaptive).value - flagship_rate(p)));
        }
        return worst;
    });
    run.check("nu_bar_q_flagship", 1e-7, [&] { return linf_distance(nu_bar_q(nu, kQ, adaptive), ProbVector({1, 2}, {0.2, 0.8})); });
    run.check("nu_bar_0_size_bias", 1e-12, [&] { return linf_distance(nu_bar_q(nu, 0.0), ProbVector({1, 2}, {1.0 / 3.0, 2.0 / 3.0})); });
    run.check("duality_identity_random", 1e-6, [&] {
        RngStream r = root.substream(1);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            int size = 2 + static_cast<int>(r.below(3));
            Support s;
            int atom = static_cast<int>(r.below(2));
            for (int k = 0; k < size; ++k) {
                s.push_back(atom);
                atom += 1 + static_cast<int>(r.below(3));
            }
            std::vector<double> w(s.size());
            double tot = 0.0;
            for (double& x : w) tot += (x = 0.05 + r.uniform());
            for (double& x : w) x /= tot;
            OffspringLaw law(s, w);
            double q = 0.05 + 0.9 * r.uniform();
            ProbVector bar = nu_bar_q(law, q);
            double lhs = pair(bar, LogWeights::log_of_atoms(s)).value() - lambda_q_star(bar, law, q).value;
            worst = std::max(worst, std::abs(lhs - growth_exponent(law, q)));
        }
        return worst;
    });
    const ProbVector rho({1, 2}, {0.2, 0.8});
    const double h_const = relative_entropy(rho, mix(kQ, rho, nu.as_prob_vector())).value();
    double control_value = std::nan("");
    run.check("control_vs_dual_relative_gap", 0.02, [&] {
        ControlOptions opt;
        opt.seed = seed;
        control_value = solve_control(rho, nu, kQ, 64, opt).value;
        double dual = lambda_q_star(rho, nu, kQ).value;
        return std::abs(control_value - dual) / dual;
    });
    run.check("control_strictly_below_constant_bound", 1e-3, [&] { return h_const - control_value; },
              [](double obs, double tol) { return obs > tol; });
    run.check("enumeration_vs_dynamic_programming", 1e-12, [&] {
        double worst = 0.0;
        for (double q : {0.0, kQ})
            for (int n = 1; n <= 6; ++n) {
                double a = total_expected_count(enumerate_expected_counts(nu, q, n));
                double b = total_expected_count(urn_expected_counts(nu, q, n));
                worst = std::max(worst, std::abs(a - b) / b);
            }
        return worst;
    });
    const std::int64_t reps = full ? 100000 : 20000;
    run.check("many_to_one_vs_enumeration_zscore", 3.0, [&] {
        double worst = 0.0;
        for (double q : {0.0, kQ}) {
            double exact = total_expected_count(enumerate_expected_counts(nu, q, 6));
            Estimate m = many_to_one_estimate(nu, q, 6, reps, {}, root.substream(q == 0.0 ? 2 : 3));
            worst = std::max(worst, z_score(m.mean, exact, m.standard_error));
        }
        return worst;
    });
    run.check("simulation_vs_enumeration_zscore", 3.0, [&] {
        double worst = 0.0;
        for (double q : {0.0, kQ}) {
            double exact = total_expected_count(enumerate_expected_counts(nu, q, 6));
            PopulationSummary s = summarize_population(nu, q, 6, reps, kDefaultPopulationCap,
                                                       root.substream(q == 0.0 ? 4 : 5), Engine::PerIndividual);
            worst = std::max(worst, z_score(s.population.mean, exact, s.population.standard_error));
        }
        return worst;
    });
    run.check("growth_exponent_many_to_one_n16", 0.02, [&] {
        Estimate m = many_to_one_estimate(nu, kQ, 16, full ? 1000000 : 100000, {}, root.substream(6));
        return std::abs(std::log(m.mean) / 16.0 - std::log(1.6));
    });
    run.check("spine_urn_frequencies", 0.01, [&] {
        double worst = 0.0;
        std::vector<ProbVector> targets{ProbVector({1, 2}, {0.5, 0.5}), ProbVector({1, 2}, {0.2, 0.8})};
        if (full) {
            targets.emplace_back(Support{1, 2}, std::vector<double>{0.7, 0.3});
            targets.emplace_back(Support{1, 2}, std::vector<double>{0.05, 0.95});
            targets.emplace_back(Support{1, 2}, std::vector<double>{0.4, 0.6});
        }
        for (std::size_t t = 0; t < targets.size(); ++t) {
            RealVector a = a_from_rho(targets[t], nu, kQ);
            SpineUrnRun sp = simulate_spine_urn(nu, kQ, a, full ? 1000000 : 200000, root.substream(10 + t));
            worst = std::max(worst, linf_distance(sp.frequencies, pi_from_a(a, nu, kQ).pi));
        }
        return worst;
    });
    run.check("replacement_matrix_eigenvalue", 1e-10, [&] {
        RealVector a = a_from_rho(rho, nu, kQ);
        return std::abs(replacement_matrix(nu, kQ, a).eigenvalue - 1.0);
    });
    run.check("replacement_matrix_eigenvector", 1e-8, [&] {
        RealVector a = a_from_rho(rho, nu, kQ);
        return linf_distance(replacement_matrix(nu, kQ, a).eigenvector, pi_from_a(a, nu, kQ).pi);
    });
    run.check("lambert_w0_scaled_residual", 1e-14, [&] {
        double worst = 0.0;
        const int points = full ? 10000 : 2000;
        for (int i = 0; i < points; ++i) {
            double t = static_cast<double>(i) / (points - 1);
            double x = -std::exp(-1.0) + std::pow(10.0, -12.0 + t * 18.0);
            long double y = lambert_w0(x);
            long double res = y * std::exp(y) - static_cast<long double>(x);
            worst = std::max(worst, static_cast<double>(std::abs(res)) / std::max(1.0, std::abs(x)));
        }
        return worst;
    });
    run.check("survival_constraint_residual", 1e-10, [&] { return solve_survival_minimizer(nu, kQ).constraint_residual; });
    run.check("survival_min_below_baseline", 1e-9, [&] {
        SurvivalReport s = solve_survival_minimizer(OffspringLaw({0, 1, 3}, {0.3, 0.3, 0.4}), 0.4);
        return s.J_min - s.J_baseline;
    });
    run.check("classify_flagship_verdicts", 0.0, [&] {
        int wrong = 0;
        wrong += classify_rgw(rho, nu, kQ).kind != VerdictKind::StronglyPersistentPositiveProb;
        wrong += classify_rgw(ProbVector({1, 2}, {1.0, 0.0}), nu, kQ).kind != VerdictKind::Evanescent;
        wrong += classify_gw(ProbVector({1, 2}, {1.0 / 3.0, 2.0 / 3.0}), nu).kind != VerdictKind::StronglyPersistentPositiveProb;
        return static_cast<double>(wrong);
    });
    if (full) {
        run.check("urn_law_of_large_numbers_n1e6", 0.01, [&] {
            return linf_distance(simulate_urn(nu, kQ, 1000000, root.substream(20)).counts.normalized(), nu.as_prob_vector());
        });
    }
    return rep;
}

} // namespace rgw
