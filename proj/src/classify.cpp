#include "rgw/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>

namespace rgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_pairing(const ProbVector& rho) { return pair(rho, LogWeights::log_of_atoms(rho.support())).value(); }

// rho and nu on their common support.
std::pair<ProbVector, ProbVector> on_union(const ProbVector& rho, const ProbVector& nu) {
    Support u = support_union(rho.support(), nu.support());
    return {align(rho, u), align(nu, u)};
}

bool mass_outside(const ProbVector& rho, const Support& s) {
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho[i] > 0.0 && !std::binary_search(s.begin(), s.end(), rho.support()[i])) return true;
    return false;
}

VerdictKind decide(double ev, double pers, bool subcritical) {
    if (ev > kDecisionTolerance) return VerdictKind::Evanescent;
    if (pers > kDecisionTolerance) return VerdictKind::StronglyPersistentPositiveProb;
    return subcritical ? VerdictKind::NotStronglyPersistent : VerdictKind::Indeterminate;
}

ProbVector shift_down(const ProbVector& mu) {
    Support s;
    std::vector<double> w;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.support()[i] == 0) {
            if (mu[i] > 0.0) throw ContractError("type-1 degrees are at least 1; mu has mass at 0");
            continue;
        }
        s.push_back(mu.support()[i] - 1);
        w.push_back(mu[i]);
    }
    return ProbVector(std::move(s), std::move(w));
}

double entropy_on_union(const ProbVector& a, const ProbVector& b) {
    auto [x, y] = on_union(a, b);
    return relative_entropy(x, y).value();
}

} // namespace

std::string to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::Evanescent: return "Evanescent";
    case VerdictKind::StronglyPersistentPositiveProb: return "StronglyPersistentPositiveProb";
    case VerdictKind::NotStronglyPersistent: return "NotStronglyPersistent";
    case VerdictKind::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

Verdict classify_gw(const ProbVector& rho, const OffspringLaw& nu) {
    const double ell = log_pairing(rho);
    const double h = entropy_on_union(rho, nu.as_prob_vector());
    Verdict v;
    v.margin_evanescence = h - ell;
    v.margin_persistence = ell - h;
    v.subcritical_flag = nu.mean() < 1.0;
    v.kind = decide(v.margin_evanescence, v.margin_persistence, v.subcritical_flag);
    return v;
}

Verdict classify_rgw(const ProbVector& rho, const OffspringLaw& nu, double q, const QuadratureSpec& spec) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    const double ell = log_pairing(rho);
    // Off the support of nu the urn never produces rho, so the rate is infinite.
    double rate = mass_outside(rho, nu.support()) ? kInf : lambda_q_star(align(rho, nu.support()), nu, q, spec).value;
    auto [r, n] = on_union(rho, nu.as_prob_vector());
    const double hq = relative_entropy(r, mix(q, r, n)).value();
    Verdict v;
    v.margin_evanescence = rate - ell;
    v.margin_persistence = ell - hq;
    v.subcritical_flag = q * mean(rho) + (1.0 - q) * nu.mean() < 1.0;
    v.kind = decide(v.margin_evanescence, v.margin_persistence, v.subcritical_flag);
    return v;
}

std::optional<double> min_memory_for_persistence(const ProbVector& rho, const OffspringLaw& nu) {
    if (rho.mass_at(0) > 0.0) throw ContractError("rho must not charge 0");
    if (rho.mass_at(1) >= 1.0) throw ContractError("rho = delta_1 has no persistence threshold");
    const double h = entropy_on_union(rho, nu.as_prob_vector());
    if (!std::isfinite(h)) return std::nullopt;
    if (h == 0.0) return 0.0;
    return std::max(0.0, 1.0 - log_pairing(rho) / h);
}

RealVector a_from_rho(const ProbVector& rho, const OffspringLaw& nu, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (rho.mass_at(0) > 0.0) throw ContractError("rho must not charge 0");
    if (mass_outside(rho, nu.support())) throw ContractError("rho must be absolutely continuous with respect to nu");
    ProbVector r = align(rho, nu.support());
    RealVector a(nu.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k)
        if (nu.support()[k] != 0) a[k] = r[k] / (q * r[k] + (1.0 - q) * nu[k]);
    double g = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) g += nu[k] / (1.0 - q * a[k]);
    if (std::abs(g - 1.0 / (1.0 - q)) > 1e-10) throw NumericError("admissibility identity failed", std::abs(g - 1.0 / (1.0 - q)));
    PersistenceTarget t = pi_from_a(a, nu, q);
    if (linf_distance(t.pi, r) > 1e-10) throw NumericError("pi_a does not reproduce rho", linf_distance(t.pi, r));
    return a;
}

PersistenceTarget pi_from_a(const RealVector& a, const OffspringLaw& nu, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (a.size() != nu.size()) throw ContractError("a must be aligned with the support of nu");
    double g = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] >= 0.0 && a[k] < 1.0 / q)) throw ContractError("a(k) must lie in [0, 1/q)");
        if (nu.support()[k] == 0 && a[k] != 0.0) throw ContractError("a(0) must be 0");
        g += nu[k] / (1.0 - q * a[k]);
    }
    if (std::abs(g - 1.0 / (1.0 - q)) > 1e-8) throw ContractError("a violates sum nu(j)/(1 - q a(j)) = 1/(1-q)");
    std::vector<double> pi(a.size());
    double criterion = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        pi[k] = (1.0 - q) * a[k] * nu[k] / (1.0 - q * a[k]);
        if (pi[k] > 0.0) criterion += pi[k] * std::log(a[k] / nu.support()[k]);
    }
    // The constraint holds only to 1e-8, so renormalize before building the vector.
    double total = 0.0;
    for (double x : pi) total += x;
    for (double& x : pi) x /= total;
    return {ProbVector(nu.support(), std::move(pi)), criterion};
}

Support two_type_support(const OffspringLaw& nu, const OffspringLaw& nu_prime) {
    Support shifted;
    for (int k : nu.support()) shifted.push_back(k + 1);
    return support_union(shifted, nu_prime.support());
}

WeakPersistence two_type_weak_persistence(const ProbVector& rho, const OffspringLaw& nu, const OffspringLaw& nu_prime,
                                          double s, const ProbVector& mu, const ProbVector& mu_prime) {
    if (!(s > 0.0 && s <= 1.0)) throw ContractError("mixing weight s must lie in (0,1]");
    Support u = support_union(support_union(rho.support(), mu.support()), mu_prime.support());
    ProbVector r = align(rho, u);
    ProbVector m = align(mu, u);
    ProbVector mp = align(mu_prime, u);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(r[i] - (s * m[i] + (1.0 - s) * mp[i])) > 1e-10)
            throw ContractError("rho != s mu + (1-s) mu' within 1e-10");

    ProbVector tau = shift_down(mu);
    const double first = log_pairing(tau) - entropy_on_union(tau, nu.as_prob_vector());
    WeakPersistence out;
    out.margin_first = first;
    if (s == 1.0) {
        out.strong_branch = true;
        out.margin_second = first;
    } else {
        const double ell_prime = log_pairing(mu_prime);
        const double h_prime = entropy_on_union(mu_prime, nu_prime.as_prob_vector());
        const double h_tau = entropy_on_union(tau, nu.as_prob_vector());
        out.margin_second = s * log_pairing(tau) + (1.0 - s) * ell_prime - s * h_tau - (1.0 - s) * h_prime;
    }
    out.certified = out.margin_first > kDecisionTolerance && out.margin_second > kDecisionTolerance;
    return out;
}

WeakPersistenceSearch two_type_grid_search(const ProbVector& rho, const OffspringLaw& nu, const OffspringLaw& nu_prime,
                                           int mesh) {
    if (mesh < 1 || mesh > 400) throw ContractError("grid mesh must lie in [1, 400]");
    Support u = support_union(rho.support(), two_type_support(nu, nu_prime));
    ProbVector r = align(rho, u);
    std::vector<std::size_t> type1; // atoms >= 1 that a type-1 degree can take
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] >= 1 && nu.prob(u[i] - 1) > 0.0) type1.push_back(i);
    WeakPersistenceSearch best;
    double best_score = -kInf;
    if (type1.empty()) return best;

    std::vector<int> parts(type1.size(), 0);
    std::size_t visited = 0;
    std::function<void(std::size_t, int)> lattice = [&](std::size_t pos, int left) {
        if (++visited > 2'000'000) throw ContractError("grid search lattice too large; lower the mesh");
        if (pos + 1 == type1.size()) {
            parts[pos] = left;
            std::vector<double> w(u.size(), 0.0);
            for (std::size_t j = 0; j < type1.size(); ++j) w[type1[j]] = static_cast<double>(parts[j]) / mesh;
            ProbVector mu(u, w);
            for (int si = 1; si <= mesh; ++si) {
                double s = static_cast<double>(si) / mesh;
                std::vector<double> rest(r.weights().begin(), r.weights().end());
                bool ok = true;
                if (si == mesh) {
                    // s = 1 needs mu = rho; mu' is then irrelevant.
                    for (std::size_t i = 0; i < u.size(); ++i) ok = ok && std::abs(r[i] - w[i]) <= 1e-10;
                } else {
                    double tot = 0.0;
                    for (std::size_t i = 0; i < u.size(); ++i) {
                        double x = (r[i] - s * w[i]) / (1.0 - s);
                        ok = ok && x >= -1e-12;
                        rest[i] = std::max(x, 0.0);
                        tot += rest[i];
                    }
                    ok = ok && std::abs(tot - 1.0) <= 1e-9;
                    if (ok)
                        for (double& x : rest) x /= tot;
                }
                if (!ok) continue;
                ProbVector mp(u, rest);
                WeakPersistence res;
                try {
                    res = two_type_weak_persistence(r, nu, nu_prime, s, mu, mp);
                } catch (const ContractError&) {
                    continue;
                }
                double score = std::min(res.margin_first, res.margin_second);
                if (score > best_score) {
                    best_score = score;
                    best = {res.certified, s, mu, mp, res};
                }
            }
            return;
        }
        for (int v = 0; v <= left; ++v) {
            parts[pos] = v;
            lattice(pos + 1, left - v);
        }
    };
    lattice(0, mesh);
    return best;
}

} // namespace rgw
