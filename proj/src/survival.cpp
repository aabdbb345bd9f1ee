#include "rgw/survival.hpp"

#include <cmath>
#include <limits>

#include "rgw/errors.hpp"

namespace rgw {

namespace {

void check(const OffspringLaw& nu, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (nu.max_atom() == 0) throw ContractError("nu = delta_0 has no admissible a");
}

// Monotone bisection for an increasing function on (lo, hi); returns the root to machine precision.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double target) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < target) lo = mid;
        else hi = mid;
    }
    return std::abs(f(lo) - target) <= std::abs(f(hi) - target) ? lo : hi;
}

} // namespace

double lambert_w0(double x) {
    constexpr long double kInvE = 0.367879441171442321595523770161460867L;
    if (std::isnan(x)) throw ContractError("lambert_w0 of NaN");
    if (x < -static_cast<double>(kInvE)) throw ContractError("lambert_w0 is undefined below -1/e");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
    const long double X = x;
    long double w;
    if (X < -0.25L) {
        // Branch-point series in p = sqrt(2(e x + 1)).
        long double p = std::sqrt(std::max(0.0L, 2.0L * (X / kInvE + 1.0L)));
        w = -1.0L + p - p * p / 3.0L + 11.0L / 72.0L * p * p * p;
    } else if (X < 3.0L) {
        w = std::log1p(X);
        w = w * (1.0L - std::log1p(w) / (2.0L + w));
    } else {
        long double l1 = std::log(X);
        long double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    if (w <= -1.0L) return -1.0;
    for (int i = 0; i < 64; ++i) {
        long double ew = std::exp(w);
        long double f = w * ew - X;
        long double wp1 = w + 1.0L;
        if (wp1 <= 0.0L) break;
        long double step = f / (ew * wp1 - (w + 2.0L) * f / (2.0L * wp1));
        long double next = w - step;
        if (next <= -1.0L) next = 0.5L * (w - 1.0L);
        bool done = std::abs(next - w) <= 1e-19L * std::max(1.0L, std::abs(next));
        w = next;
        if (done) break;
    }
    return static_cast<double>(w);
}

ExtendedReal J_functional(const RealVector& a, const OffspringLaw& nu, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (a.size() != nu.size()) throw ContractError("a must be aligned with the support of nu");
    double j = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] >= 0.0 && a[k] < 1.0 / q)) throw ContractError("a(k) must lie in [0, 1/q)");
        if (nu.support()[k] == 0) {
            if (a[k] > 0.0) return ExtendedReal::plus_infinity();
            continue;
        }
        if (a[k] == 0.0) continue;
        j += nu[k] * (1.0 - q) * a[k] / (1.0 - q * a[k]) * std::log(a[k] / nu.support()[k]);
    }
    return ExtendedReal(j);
}

double survival_constraint(const RealVector& a, const OffspringLaw& nu, double q) {
    if (a.size() != nu.size()) throw ContractError("a must be aligned with the support of nu");
    double g = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) g += nu[k] / (1.0 - q * a[k]);
    return g;
}

RealVector lagrange_ratios(const RealVector& a, const OffspringLaw& nu, double q) {
    RealVector out;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (nu.support()[k] == 0) continue;
        // dJ/da = nu (1-q) [log(a/k)/(1-qa)^2 + 1/(1-qa)], dg/da = nu q/(1-qa)^2.
        out.push_back((1.0 - q) / q * (std::log(a[k] / nu.support()[k]) + 1.0 - q * a[k]));
    }
    return out;
}

ProportionalBaseline proportional_baseline(const OffspringLaw& nu, double q) {
    check(nu, q);
    const double target = 1.0 / (1.0 - q);
    const double m = nu.max_atom();
    auto b_of = [&](double c) {
        RealVector b(nu.size());
        for (std::size_t k = 0; k < b.size(); ++k) b[k] = c * nu.support()[k];
        return b;
    };
    auto g = [&](double c) { return survival_constraint(b_of(c), nu, q); };
    double hi = 1.0 / (q * m);
    double c = bisect_increasing(g, 0.0, hi, target);
    if (!(c > 0.0 && c < hi)) throw NumericError("proportional baseline root not bracketed");
    ProportionalBaseline out;
    out.c = c;
    out.residual = std::abs(g(c) - target);
    out.J_b = J_functional(b_of(c), nu, q).value();
    return out;
}

SurvivalReport solve_survival_minimizer(const OffspringLaw& nu, double q) {
    check(nu, q);
    const double target = 1.0 / (1.0 - q);
    const double m = nu.max_atom();
    // Parametrize by x = q a(max S) in (0,1): C = x e^{-x} / max S.
    auto a_of = [&](double x) {
        double c = x * std::exp(-x) / m;
        RealVector a(nu.size(), 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) {
            int j = nu.support()[k];
            if (j == 0) continue;
            a[k] = j == nu.max_atom() ? x / q : -lambert_w0(-c * j) / q;
        }
        return a;
    };
    auto g = [&](double x) { return survival_constraint(a_of(x), nu, q); };
    const double eps = 1e-14;
    double lo = eps;
    double hi = 1.0 - eps;
    if (!(g(lo) < target)) throw NumericError("survival bisection: lower end already above the constraint");
    // Push the upper end toward the singular point until the root is bracketed.
    for (int i = 0; i < 60 && g(hi) < target; ++i) hi = 1.0 - (1.0 - hi) * 0.5;
    if (!(g(hi) >= target)) throw NumericError("survival bisection: root not bracketed");
    double x = bisect_increasing(g, lo, hi, target);

    SurvivalReport rep;
    rep.C = x * std::exp(-x) / m;
    rep.a_opt = a_of(x);
    rep.constraint_residual = std::abs(g(x) - target);
    rep.J_min = J_functional(rep.a_opt, nu, q).value();
    rep.survives_certified = rep.J_min < 0.0;
    if (!nu.has_zero()) {
        rep.trivially_survives = true;
        rep.reason = "min offspring >= 1";
    } else if (rep.survives_certified) {
        rep.reason = "min J < 0";
    } else {
        rep.reason = "criterion inconclusive (min J >= 0)";
    }
    ProportionalBaseline b = proportional_baseline(nu, q);
    rep.baseline_c = b.c;
    rep.J_baseline = b.J_b;
    return rep;
}

} // namespace rgw
