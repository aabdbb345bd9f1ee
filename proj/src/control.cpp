#include "rgw/control.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "rgw/errors.hpp"
#include "rgw/parallel.hpp"
#include "rgw/rng.hpp"
#include "rgw/simplex.hpp"

namespace rgw {

ControlPath::ControlPath(std::vector<ProbVector> controls) : controls_(std::move(controls)) {
    if (controls_.size() < 2) throw ContractError("a control path needs at least two steps");
    for (const auto& c : controls_)
        if (c.support() != controls_.front().support()) throw ContractError("control steps must share one support");
}

ControlPath ControlPath::constant(const ProbVector& rho, int steps) {
    if (steps < 2) throw ContractError("a control path needs at least two steps");
    return ControlPath(std::vector<ProbVector>(static_cast<std::size_t>(steps), rho));
}

ProbVector ControlPath::psi_mid(int i) const {
    if (i < 1 || i > steps()) throw ContractError("psi_mid: step index out of range");
    const std::size_t d = support().size();
    std::vector<double> acc(d, 0.0);
    for (int j = 1; j < i; ++j)
        for (std::size_t k = 0; k < d; ++k) acc[k] += controls_[static_cast<std::size_t>(j - 1)][k];
    for (std::size_t k = 0; k < d; ++k) acc[k] = (acc[k] + 0.5 * controls_[static_cast<std::size_t>(i - 1)][k]) / (i - 0.5);
    return ProbVector(support(), std::move(acc));
}

ProbVector ControlPath::mean() const {
    const std::size_t d = support().size();
    std::vector<double> acc(d, 0.0);
    for (const auto& c : controls_)
        for (std::size_t k = 0; k < d; ++k) acc[k] += c[k];
    for (double& x : acc) x /= static_cast<double>(controls_.size());
    return ProbVector(support(), std::move(acc));
}

ExtendedReal control_objective(const ControlPath& path, const OffspringLaw& nu, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (path.support() != nu.support()) throw ContractError("control path and law must share the same support");
    const std::size_t d = nu.size();
    const int m = path.steps();
    std::vector<double> cum(d, 0.0);
    double total = 0.0;
    for (int i = 1; i <= m; ++i) {
        const ProbVector& eta = path.controls()[static_cast<std::size_t>(i - 1)];
        for (std::size_t k = 0; k < d; ++k) {
            double psi = (cum[k] + 0.5 * eta[k]) / (i - 0.5);
            double ref = q * psi + (1.0 - q) * nu[k];
            if (eta[k] > 0.0) total += eta[k] * std::log(eta[k] / ref);
        }
        for (std::size_t k = 0; k < d; ++k) cum[k] += eta[k];
    }
    return ExtendedReal(std::max(total / m, 0.0));
}

namespace {

constexpr double kTiny = 1e-300;

// Discretized problem on a flat m-by-d array of controls.
struct Problem {
    int m;
    std::size_t d;
    double q;
    std::vector<double> nu;
    std::vector<double> rho;

    double value(const std::vector<double>& x, double beta, std::vector<double>* grad) const {
        std::vector<double> cum(d, 0.0);
        std::vector<double> t(x.size());
        double f = 0.0;
        if (grad) grad->assign(x.size(), 0.0);
        for (int i = 0; i < m; ++i) {
            const double h = i + 0.5;
            for (std::size_t k = 0; k < d; ++k) {
                std::size_t at = static_cast<std::size_t>(i) * d + k;
                double eta = x[at];
                double ref = q * (cum[k] + 0.5 * eta) / h + (1.0 - q) * nu[k];
                if (eta > 0.0) f += eta * std::log(eta / ref);
                if (grad) {
                    (*grad)[at] = (std::log(std::max(eta, kTiny) / ref) + 1.0) / m;
                    t[at] = eta / ref / h;
                }
            }
            for (std::size_t k = 0; k < d; ++k) cum[k] += x[static_cast<std::size_t>(i) * d + k];
        }
        f /= m;
        double pen = 0.0;
        std::vector<double> dev(d);
        for (std::size_t k = 0; k < d; ++k) {
            dev[k] = cum[k] / m - rho[k];
            pen += dev[k] * dev[k];
        }
        f += beta * pen;
        if (grad) {
            // d/d eta_j of the reference terms: suffix sums of eta/ref weighted by the averaging rule.
            std::vector<double> tail(d, 0.0);
            for (int j = m - 1; j >= 0; --j) {
                for (std::size_t k = 0; k < d; ++k) {
                    std::size_t at = static_cast<std::size_t>(j) * d + k;
                    double s = 0.5 * t[at] + tail[k];
                    (*grad)[at] += -q * s / m + 2.0 * beta * dev[k] / m;
                    tail[k] += t[at];
                }
            }
        }
        return f;
    }

    std::vector<double> project_rows(const std::vector<double>& y) const {
        std::vector<double> out(y.size());
        std::vector<double> row(d);
        for (int i = 0; i < m; ++i) {
            std::copy_n(y.begin() + static_cast<long>(i) * static_cast<long>(d), d, row.begin());
            row = project_to_simplex(row);
            std::copy(row.begin(), row.end(), out.begin() + static_cast<long>(i) * static_cast<long>(d));
        }
        return out;
    }

    double mean_residual(const std::vector<double>& x) const {
        double r = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += x[static_cast<std::size_t>(i) * d + k];
            r = std::max(r, std::abs(s / m - rho[k]));
        }
        return r;
    }
};

// Spectral projected gradient with a nonmonotone line search.
void minimize_stage(const Problem& pb, std::vector<double>& x, double beta, int max_iter) {
    std::vector<double> g;
    double f = pb.value(x, beta, &g);
    std::deque<double> history{f};
    double alpha = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - g[i];
        std::vector<double> full = pb.project_rows(y);
        double pg = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) pg = std::max(pg, std::abs(full[i] - x[i]));
        if (pg < 1e-12) break;

        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - alpha * g[i];
        std::vector<double> p = pb.project_rows(y);
        std::vector<double> dir(x.size());
        double gtd = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            dir[i] = p[i] - x[i];
            gtd += g[i] * dir[i];
        }
        if (!(gtd < 0.0)) break;
        const double f_ref = *std::max_element(history.begin(), history.end());
        double lam = 1.0;
        std::vector<double> xn(x.size());
        std::vector<double> gn;
        double fn = 0.0;
        bool ok = false;
        for (int bt = 0; bt < 60; ++bt, lam *= 0.5) {
            for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + lam * dir[i];
            fn = pb.value(xn, beta, nullptr);
            if (fn <= f_ref + 1e-4 * lam * gtd) {
                ok = true;
                break;
            }
        }
        if (!ok) break;
        pb.value(xn, beta, &gn);
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double s = xn[i] - x[i];
            ss += s * s;
            sy += s * (gn[i] - g[i]);
        }
        alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e3;
        x.swap(xn);
        g.swap(gn);
        f = fn;
        history.push_back(f);
        if (history.size() > 10) history.pop_front();
    }
}

// Shift every step by the mean defect and re-project until the average constraint holds.
bool repair(const Problem& pb, std::vector<double>& x) {
    for (int round = 0; round < 500; ++round) {
        if (pb.mean_residual(x) < 1e-14) return true;
        std::vector<double> shift(pb.d, 0.0);
        for (std::size_t k = 0; k < pb.d; ++k) {
            double s = 0.0;
            for (int i = 0; i < pb.m; ++i) s += x[static_cast<std::size_t>(i) * pb.d + k];
            shift[k] = pb.rho[k] - s / pb.m;
        }
        for (int i = 0; i < pb.m; ++i)
            for (std::size_t k = 0; k < pb.d; ++k) x[static_cast<std::size_t>(i) * pb.d + k] += shift[k];
        x = pb.project_rows(x);
    }
    return pb.mean_residual(x) < 1e-12;
}

ControlPath to_path(const Problem& pb, const Support& support, const std::vector<double>& x) {
    std::vector<ProbVector> steps;
    steps.reserve(static_cast<std::size_t>(pb.m));
    for (int i = 0; i < pb.m; ++i) {
        auto first = x.begin() + static_cast<long>(i) * static_cast<long>(pb.d);
        steps.emplace_back(support, std::vector<double>(first, first + static_cast<long>(pb.d)));
    }
    return ControlPath(std::move(steps));
}

} // namespace

ControlResult solve_control(const ProbVector& rho, const OffspringLaw& nu, double q, int m, const ControlOptions& opt) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (m < 8) throw ContractError("control discretization needs m >= 8");
    if (opt.restarts < 1) throw ContractError("at least one restart is required");
    if (rho.support() != nu.support()) throw ContractError("rho and nu must share the same support");

    Problem pb{m, nu.size(), q, std::vector<double>(nu.weights().begin(), nu.weights().end()),
               std::vector<double>(rho.weights().begin(), rho.weights().end())};
    const ControlPath constant = ControlPath::constant(rho, m);
    const double constant_value = control_objective(constant, nu, q).value();

    const auto restarts = static_cast<std::size_t>(opt.restarts);
    std::vector<double> values(restarts, std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> paths(restarts);
    std::vector<double> residuals(restarts, 0.0);
    RngStream base(opt.seed, 0x636f6e74726f6cull);

    parallel_for(restarts, [&](std::size_t r) {
        std::vector<double> x(static_cast<std::size_t>(m) * pb.d);
        RngStream rng = base.substream(r);
        for (int i = 0; i < m; ++i) {
            std::vector<double> e(pb.d);
            double tot = 0.0;
            for (double& v : e) {
                v = -std::log(rng.uniform());
                tot += v;
            }
            for (std::size_t k = 0; k < pb.d; ++k) {
                double mixw = r == 0 ? 0.0 : opt.dirichlet_mix;
                x[static_cast<std::size_t>(i) * pb.d + k] = (1.0 - mixw) * pb.rho[k] + mixw * e[k] / tot;
            }
        }
        for (double beta = 10.0; beta <= 1e6 * 1.0001; beta *= 10.0) minimize_stage(pb, x, beta, opt.max_inner_iterations);
        if (repair(pb, x)) {
            ControlPath path = to_path(pb, rho.support(), x);
            values[r] = control_objective(path, nu, q).value();
            residuals[r] = pb.mean_residual(x);
            paths[r] = std::move(x);
        }
    });

    ControlResult out{constant_value, constant, values, 0.0, -1};
    for (std::size_t r = 0; r < restarts; ++r) {
        if (values[r] < out.value) {
            out.value = values[r];
            out.best_restart = static_cast<int>(r);
            out.constraint_residual = residuals[r];
        }
    }
    if (out.best_restart >= 0) out.best_path = to_path(pb, rho.support(), paths[static_cast<std::size_t>(out.best_restart)]);
    return out;
}

double rate_by_control(const ProbVector& rho, const OffspringLaw& nu, double q, int m, int restarts, std::uint64_t seed) {
    ControlOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;
    return solve_control(rho, nu, q, m, opt).value;
}

double two_phase_probe(const ProbVector& rho, const OffspringLaw& nu, double q, double eps) {
    if (rho.support() != nu.support()) throw ContractError("rho and nu must share the same support");
    if (!(eps >= 0.0)) throw ContractError("eps must be non-negative");
    constexpr int kSteps = 1024;
    std::vector<double> plus(rho.size());
    std::vector<double> minus(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        plus[k] = rho[k] + eps * (rho[k] - nu[k]);
        minus[k] = rho[k] - eps * (rho[k] - nu[k]);
        if (plus[k] < 0.0 || minus[k] < 0.0) throw InfeasibleError("eps pushes the two-phase control off the simplex");
    }
    ProbVector a(rho.support(), plus);
    ProbVector b(rho.support(), minus);
    std::vector<ProbVector> steps;
    for (int i = 0; i < kSteps; ++i) steps.push_back(i < kSteps / 2 ? a : b);
    return control_objective(ControlPath(std::move(steps)), nu, q).value();
}

} // namespace rgw
