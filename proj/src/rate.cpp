#include "rgw/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "rgw/quadrature.hpp"
#include "rgw/simplex.hpp"

namespace rgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxPolynomialDegree = 2000;

void check_memory(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
}

void check_support(const Support& a, const Support& b) {
    if (a != b) throw ContractError("log-weights and law must share the same support");
}

// The integrand of Lambda_q after t = s e^{-lambda_bar}: (1-s)^{c*} prod_{k not tied} (1 - s r_k)^{c_k}.
struct Integrand {
    double lambda_bar = 0.0;
    double c_star = 0.0;
    std::vector<double> r;  // e^{lam - lambda_bar}, 0 at -inf
    std::vector<double> c;  // nu(k)(1-q)/q
    std::vector<bool> tied; // lam(k) attains the maximum

    double smooth(double s) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (!tied[k] && r[k] > 0.0) acc += c[k] * std::log1p(-s * r[k]);
        return std::exp(acc);
    }
};

Integrand make_integrand(const LogWeights& lam, const OffspringLaw& nu, double q) {
    Integrand it;
    it.lambda_bar = lam.max_entry();
    const double ratio = (1.0 - q) / q;
    const double tie = 1e-13 * std::max(1.0, std::abs(it.lambda_bar));
    for (std::size_t k = 0; k < lam.size(); ++k) {
        double ck = nu[k] * ratio;
        it.c.push_back(ck);
        if (lam[k] == -kInf) {
            it.r.push_back(0.0);
            it.tied.push_back(false);
            continue;
        }
        bool t = it.lambda_bar - lam[k] <= tie;
        it.tied.push_back(t);
        it.r.push_back(t ? 1.0 : std::exp(lam[k] - it.lambda_bar));
        if (t) it.c_star += ck;
    }
    return it;
}

quad::Options to_options(const QuadratureSpec& spec) {
    quad::Options o;
    o.rel_tol = spec.rel_tol;
    o.max_subdivisions = spec.max_subdivisions;
    o.jacobi_endpoint = spec.jacobi_endpoint;
    return o;
}

double integrate(const std::function<double(double)>& f, double alpha, const QuadratureSpec& spec) {
    quad::Result r = quad::integrate_endpoint_weighted(f, alpha, to_options(spec));
    if (!r.converged || !std::isfinite(r.value))
        throw NumericError("quadrature did not reach the requested tolerance (estimated error " +
                               std::to_string(r.abs_error) + ", value " + std::to_string(r.value) + ")",
                           r.abs_error, r.subdivisions);
    return r.value;
}

// ---- polynomial route: in u = 1 - s every factor is (1 - r) + r u, all coefficients >= 0.

std::vector<int> integer_exponents(const OffspringLaw& nu, double q) {
    std::vector<int> out;
    int total = 0;
    for (std::size_t k = 0; k < nu.size(); ++k) {
        double ck = nu[k] * (1.0 - q) / q;
        double rk = std::round(ck);
        if (rk < 1.0 || std::abs(ck - rk) > 1e-12 * std::max(1.0, ck)) return {};
        out.push_back(static_cast<int>(rk));
        total += out.back();
        if (total > kMaxPolynomialDegree) return {};
    }
    return out;
}

std::vector<double> expand(const std::vector<double>& r, const std::vector<int>& e, std::size_t skip_one_of) {
    std::vector<double> p{1.0};
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k] == 0.0) continue;
        int power = e[k] - (k == skip_one_of ? 1 : 0);
        for (int t = 0; t < power; ++t) {
            std::vector<double> next(p.size() + 1, 0.0);
            for (std::size_t n = 0; n < p.size(); ++n) {
                next[n] += p[n] * (1.0 - r[k]);
                next[n + 1] += p[n] * r[k];
            }
            p.swap(next);
        }
    }
    return p;
}

struct PolyEval {
    double log_integral = 0.0;
    std::vector<double> numerators;
};

PolyEval polynomial_eval(const Integrand& it, const std::vector<int>& e, bool want_grad) {
    const std::size_t none = it.r.size();
    std::vector<double> p = expand(it.r, e, none);
    double i0 = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) i0 += p[n] / static_cast<double>(n + 1);
    PolyEval out;
    out.log_integral = std::log(i0);
    if (want_grad) {
        out.numerators.assign(it.r.size(), 0.0);
        for (std::size_t j = 0; j < it.r.size(); ++j) {
            if (it.r[j] == 0.0) continue;
            // c_j r_j int_0^1 (1-u) P_j(u) du with one factor of atom j removed.
            std::vector<double> pj = expand(it.r, e, j);
            double s = 0.0;
            for (std::size_t n = 0; n < pj.size(); ++n)
                s += pj[n] / (static_cast<double>(n + 1) * static_cast<double>(n + 2));
            out.numerators[j] = e[j] * it.r[j] * s;
        }
    }
    return out;
}

std::vector<double> grad_values(const LogWeights& lam, const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    Integrand it = make_integrand(lam, nu, q);
    std::vector<double> num(it.r.size(), 0.0);
    double i0 = 0.0;
    std::vector<int> e = spec.polynomial_fast_path ? integer_exponents(nu, q) : std::vector<int>{};
    if (!e.empty()) {
        PolyEval pe = polynomial_eval(it, e, true);
        num = pe.numerators;
        i0 = std::exp(pe.log_integral);
    } else {
        i0 = integrate([&](double s) { return it.smooth(s); }, it.c_star, spec);
        double tied_integral = integrate([&](double s) { return s * it.smooth(s); }, it.c_star - 1.0, spec);
        for (std::size_t j = 0; j < it.r.size(); ++j) {
            if (it.r[j] == 0.0) continue;
            if (it.tied[j]) {
                num[j] = it.c[j] * tied_integral;
            } else {
                const double rj = it.r[j];
                num[j] = it.c[j] * integrate([&](double s) { return it.smooth(s) * s * rj / (1.0 - s * rj); },
                                             it.c_star, spec);
            }
        }
    }
    double total = std::accumulate(num.begin(), num.end(), 0.0);
    // Integration by parts makes the numerators sum to the normalizing integral.
    if (!(std::abs(total / i0 - 1.0) < 1e-9))
        throw NumericError("gradient components do not sum to one (sum " + std::to_string(total / i0) + ")",
                           std::abs(total / i0 - 1.0));
    for (double& x : num) x /= total;
    return num;
}

double dot_finite(const ProbVector& rho, const std::vector<double>& lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho[i] > 0.0) s += rho[i] * lam[i];
    return s;
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw ContractError("quadrature tolerance must lie in (0, 1e-4]");
    if (max_subdivisions < 1) throw ContractError("quadrature needs at least one subdivision");
}

ExtendedReal lambda0(const LogWeights& lam, const OffspringLaw& nu) {
    check_support(lam.support(), nu.support());
    if (lam.all_minus_infinity()) return ExtendedReal::minus_infinity();
    double m = lam.max_entry();
    double s = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) s += nu[k] * std::exp(lam[k] - m);
    return ExtendedReal(m + std::log(s));
}

ExtendedReal lambda0_star(const ProbVector& rho, const OffspringLaw& nu) { return relative_entropy(rho, nu); }

bool polynomial_route_available(const OffspringLaw& nu, double q) {
    check_memory(q);
    return !integer_exponents(nu, q).empty();
}

double lambda_q(const LogWeights& lam, const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    check_memory(q);
    check_support(lam.support(), nu.support());
    spec.validate();
    if (lam.all_minus_infinity()) return -kInf;
    Integrand it = make_integrand(lam, nu, q);
    std::vector<int> e = spec.polynomial_fast_path ? integer_exponents(nu, q) : std::vector<int>{};
    double log_i0 = !e.empty() ? polynomial_eval(it, e, false).log_integral
                               : std::log(integrate([&](double s) { return it.smooth(s); }, it.c_star, spec));
    return std::log(q) + it.lambda_bar - log_i0;
}

double lambda_q_polynomial(const LogWeights& lam, const OffspringLaw& nu, double q) {
    check_memory(q);
    check_support(lam.support(), nu.support());
    std::vector<int> e = integer_exponents(nu, q);
    if (e.empty()) throw ContractError("polynomial route needs integer exponents nu(k)(1-q)/q");
    if (lam.all_minus_infinity()) return -kInf;
    Integrand it = make_integrand(lam, nu, q);
    return std::log(q) + it.lambda_bar - polynomial_eval(it, e, false).log_integral;
}

ProbVector grad_lambda_q(const LogWeights& lam, const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    check_memory(q);
    check_support(lam.support(), nu.support());
    spec.validate();
    if (lam.all_minus_infinity()) throw ContractError("gradient undefined at the all-(-inf) vector");
    return ProbVector(nu.support(), grad_values(lam, nu, q, spec));
}

ProbVector grad_lambda_q_polynomial(const LogWeights& lam, const OffspringLaw& nu, double q) {
    QuadratureSpec spec;
    if (!polynomial_route_available(nu, q)) throw ContractError("polynomial route needs integer exponents nu(k)(1-q)/q");
    return grad_lambda_q(lam, nu, q, spec);
}

RateDual lambda_q_star(const ProbVector& rho, const OffspringLaw& nu, double q, const QuadratureSpec& spec,
                       const DualSolverOptions& opt) {
    check_memory(q);
    check_support(rho.support(), nu.support());
    spec.validate();
    const std::size_t n = rho.size();

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
        if (rho[i] > 0.0) active.push_back(i);
    const std::size_t anchor = *std::max_element(active.begin(), active.end(),
                                                 [&](std::size_t a, std::size_t b) { return rho[a] < rho[b]; });
    std::vector<std::size_t> free;
    for (std::size_t i : active)
        if (i != anchor) free.push_back(i);

    std::vector<double> lam(n, -kInf);
    for (std::size_t i : active) lam[i] = std::log(rho[i] / nu[i]) - std::log(rho[anchor] / nu[anchor]);

    auto weights = [&](const std::vector<double>& v) { return LogWeights(nu.support(), v); };
    auto objective = [&](const std::vector<double>& v) { return dot_finite(rho, v) - lambda_q(weights(v), nu, q, spec); };
    auto residual_of = [&](const std::vector<double>& g) {
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(g[i] - rho[i]));
        return r;
    };

    RateDual out;
    std::vector<double> g = grad_values(weights(lam), nu, q, spec);
    double res = residual_of(g);
    double phi = objective(lam);
    int it = 0;
    const std::size_t m = free.size();
    const double h = 1e-5;
    while (res >= opt.tolerance && it < opt.max_iterations) {
        ++it;
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
        for (std::size_t a = 0; a < m; ++a) rhs(static_cast<Eigen::Index>(a)) = rho[free[a]] - g[free[a]];

        Eigen::MatrixXd hess(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t b = 0; b < m; ++b) {
            std::vector<double> up = lam;
            std::vector<double> dn = lam;
            up[free[b]] += h;
            dn[free[b]] -= h;
            std::vector<double> gu = grad_values(weights(up), nu, q, spec);
            std::vector<double> gd = grad_values(weights(dn), nu, q, spec);
            for (std::size_t a = 0; a < m; ++a)
                hess(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = (gu[free[a]] - gd[free[a]]) / (2.0 * h);
        }
        hess = 0.5 * (hess + hess.transpose()).eval();

        Eigen::VectorXd newton;
        bool have_newton = false;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
            newton = ldlt.solve(rhs);
            have_newton = newton.allFinite() && newton.dot(rhs) > 0.0;
        }

        bool accepted = false;
        for (int attempt = have_newton ? 0 : 1; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd d = attempt == 0 ? newton : rhs;
            double cap = d.cwiseAbs().maxCoeff();
            if (cap > 5.0) d *= 5.0 / cap;
            double slope = d.dot(rhs);
            double t = 1.0;
            for (int bt = 0; bt < 50; ++bt, t *= 0.5) {
                std::vector<double> trial = lam;
                for (std::size_t a = 0; a < m; ++a) trial[free[a]] += t * d(static_cast<Eigen::Index>(a));
                double phi_t = objective(trial);
                if (phi_t >= phi + 1e-4 * t * slope - 1e-13 * (1.0 + std::abs(phi))) {
                    lam = trial;
                    phi = phi_t;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) break;
        g = grad_values(weights(lam), nu, q, spec);
        res = residual_of(g);
    }

    double top = -kInf;
    for (std::size_t i : active) top = std::max(top, lam[i]);
    for (std::size_t i : active) lam[i] -= top;
    out.argdual = weights(lam);
    out.value = dot_finite(rho, lam) - lambda_q(out.argdual, nu, q, spec);
    if (out.value < 0.0 && out.value > -1e-12) out.value = 0.0;
    out.residual = res;
    out.iterations = it;
    if (!(res < opt.tolerance))
        throw DualSolverError("dual solver stalled with residual " + std::to_string(res), out);
    return out;
}

ProbVector nu_bar_q(const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    if (!(q >= 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in [0,1)");
    if (q == 0.0) return size_bias(nu);
    LogWeights ln = LogWeights::log_of_atoms(nu.support());
    if (ln.all_minus_infinity()) throw ContractError("nu = delta_0 has no concentration target");
    return grad_lambda_q(ln, nu, q, spec);
}

double growth_exponent(const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    if (!(q >= 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in [0,1)");
    if (q == 0.0) return std::log(nu.mean());
    return lambda_q(LogWeights::log_of_atoms(nu.support()), nu, q, spec);
}

HalfspaceMinimum argmin_rate_over_halfspace(const OffspringLaw& nu, double q, const RealVector& w, double c,
                                            const QuadratureSpec& spec) {
    check_memory(q);
    if (w.size() != nu.size()) throw ContractError("half-space normal must be aligned with the support");
    for (double x : w)
        if (!std::isfinite(x)) throw ContractError("half-space normal must be finite");
    const std::size_t n = nu.size();
    std::vector<double> x(nu.weights().begin(), nu.weights().end());
    auto inner = [&](const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), w.begin(), 0.0); };

    if (inner(x) >= c) return {nu.as_prob_vector(), 0.0, 0, 0.0};
    const std::size_t top = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    if (!(w[top] > c)) throw InfeasibleError("half-space {<rho,w> >= c} has no interior point in the simplex");

    // Interior feasible start on the segment from nu toward the best vertex.
    double theta = (c - inner(x)) / (w[top] - inner(x));
    for (std::size_t i = 0; i < n; ++i) x[i] = (1.0 - theta) * x[i] + (i == top ? theta : 0.0);

    auto evaluate = [&](const std::vector<double>& v, std::vector<double>& grad) {
        RateDual d = lambda_q_star(ProbVector(nu.support(), v), nu, q, spec);
        double lo = kInf;
        for (std::size_t i = 0; i < n; ++i)
            if (std::isfinite(d.argdual[i])) lo = std::min(lo, d.argdual[i]);
        grad.resize(n);
        // Off-support coordinates have gradient -inf; a large finite stand-in pushes mass back in.
        for (std::size_t i = 0; i < n; ++i) grad[i] = std::isfinite(d.argdual[i]) ? d.argdual[i] : lo - 50.0;
        return d.value;
    };
    auto pg_norm = [&](const std::vector<double>& v, const std::vector<double>& grad) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = v[i] - grad[i];
        std::vector<double> p = project_to_simplex_halfspace(y, w, c);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(p[i] - v[i]));
        return r;
    };

    std::vector<double> grad;
    double f = evaluate(x, grad);
    double step = 0.1;
    int it = 0;
    double pg = pg_norm(x, grad);
    std::vector<double> x_prev;
    std::vector<double> g_prev;
    while (pg >= 1e-8 && it < 1000) {
        ++it;
        if (!x_prev.empty()) {
            double ss = 0.0;
            double sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double si = x[i] - x_prev[i];
                double yi = grad[i] - g_prev[i];
                ss += si * si;
                sy += si * yi;
            }
            if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-8, 1e3);
        }
        bool accepted = false;
        std::vector<double> g_new;
        for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - step * grad[i];
            std::vector<double> cand = project_to_simplex_halfspace(y, w, c);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrease += grad[i] * (cand[i] - x[i]);
            double f_new = evaluate(cand, g_new);
            if (f_new <= f + 1e-4 * decrease + 1e-14 * (1.0 + std::abs(f))) {
                x_prev = x;
                g_prev = grad;
                x = cand;
                grad = g_new;
                f = f_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        pg = pg_norm(x, grad);
    }
    if (pg > 1e-6)
        throw NumericError("projected gradient did not converge (projected-gradient norm " + std::to_string(pg) + ")", pg, it);
    return {ProbVector(nu.support(), x), f, it, pg};
}

} // namespace rgw
