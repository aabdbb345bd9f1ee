#include "rgw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgw/errors.hpp"
#include "rgw/parallel.hpp"

namespace rgw {

namespace {

constexpr std::size_t kChunks = 64;

void check_memory_closed(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in [0,1)");
}

std::vector<double> law_weights(const OffspringLaw& nu) { return {nu.weights().begin(), nu.weights().end()}; }

// Index of a uniformly chosen earlier ball, given per-atom counts summing to total.
std::size_t uniform_ball(RngStream& rng, const std::int64_t* counts, std::size_t d, std::int64_t total) {
    auto u = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
    for (std::size_t k = 0; k < d; ++k) {
        if (u < counts[k]) return k;
        u -= counts[k];
    }
    return d - 1;
}

// Next reinforced draw: copy a uniform earlier ball with probability q, else sample nu.
std::size_t urn_step(RngStream& rng, const std::vector<double>& nu, double q, const std::int64_t* counts,
                     std::int64_t drawn) {
    if (drawn > 0 && q > 0.0 && rng.uniform() < q) return uniform_ball(rng, counts, nu.size(), drawn);
    return rng.categorical(nu);
}

std::vector<std::int64_t> multinomial(RngStream& rng, std::int64_t trials, const std::vector<double>& p) {
    std::vector<std::int64_t> out(p.size(), 0);
    double rest = std::accumulate(p.begin(), p.end(), 0.0);
    std::int64_t left = trials;
    for (std::size_t k = 0; k < p.size() && left > 0; ++k) {
        if (k + 1 == p.size() || p[k] >= rest) {
            out[k] = left;
            left = 0;
            break;
        }
        double prob = rest > 0.0 ? std::clamp(p[k] / rest, 0.0, 1.0) : 0.0;
        auto x = static_cast<std::int64_t>(rng.binomial(static_cast<std::uint64_t>(left), prob));
        out[k] = x;
        left -= x;
        rest -= p[k];
    }
    return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    if (a != 0 && b > std::numeric_limits<std::int64_t>::max() / a) return std::numeric_limits<std::int64_t>::max();
    return a * b;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    if (b > std::numeric_limits<std::int64_t>::max() - a) return std::numeric_limits<std::int64_t>::max();
    return a + b;
}

Estimate estimate_from(const std::vector<double>& xs) {
    Estimate e;
    e.samples = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return e;
    double s = 0.0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - e.mean) * (x - e.mean);
        v /= static_cast<double>(xs.size() - 1);
        e.standard_error = std::sqrt(v / static_cast<double>(xs.size()));
    }
    return e;
}

GenerationReport root_report(std::size_t d) {
    GenerationReport r;
    r.generation = 0;
    r.population = 1;
    r.histogram[CountKey(d, 0)] = 1;
    r.survived = true;
    return r;
}

bool in_halfspace(const std::vector<std::int64_t>& counts, const RealVector& w, double c, int n) {
    double s = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) s += static_cast<double>(counts[k]) * w[k];
    return s / n >= c - 1e-12 * std::max(1.0, std::abs(c));
}

std::size_t state_count_bound(int n, std::size_t d) {
    // C(n + d - 1, d - 1), saturating.
    double v = 1.0;
    for (std::size_t i = 1; i < d; ++i) v = v * static_cast<double>(n + static_cast<int>(i)) / static_cast<double>(i);
    return v > 1e15 ? static_cast<std::size_t>(1e15) : static_cast<std::size_t>(v);
}

std::map<CountKey, double> urn_dp(const OffspringLaw& nu, double q, int n, bool tilt) {
    check_memory_closed(q);
    if (n < 1) throw ContractError("urn length must be at least 1");
    const std::size_t d = nu.size();
    if (state_count_bound(n, d) > 5'000'000) throw ContractError("too many urn states for exact dynamic programming");
    std::map<CountKey, double> cur;
    cur[CountKey(d, 0)] = 1.0;
    for (int i = 0; i < n; ++i) {
        std::map<CountKey, double> next;
        for (const auto& [key, val] : cur) {
            for (std::size_t k = 0; k < d; ++k) {
                double p = i == 0 ? nu[k] : q * static_cast<double>(key[k]) / i + (1.0 - q) * nu[k];
                double v = val * p * (tilt ? nu.support()[k] : 1.0);
                if (v == 0.0) continue;
                CountKey nk = key;
                ++nk[k];
                next[nk] += v;
            }
        }
        cur.swap(next);
    }
    return cur;
}

} // namespace

bool LineageState::consistent(const Support& support) const {
    if (counts.size() != support.size()) return false;
    std::int64_t total = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0) return false;
        if (support[k] == 0 && counts[k] != 0) return false;
        total += counts[k];
    }
    return total == generation;
}

std::vector<GenerationReport> simulate_rgw(const OffspringLaw& nu, double q, int n_max, std::int64_t pop_cap,
                                           const RngStream& rng) {
    check_memory_closed(q);
    if (n_max < 1) throw ContractError("n_max must be at least 1");
    if (pop_cap < 1) throw ContractError("pop_cap must be at least 1");
    const std::size_t d = nu.size();
    const std::vector<double> weights = law_weights(nu);

    std::vector<std::int64_t> current(d, 0); // flat: individual i owns [i*d, (i+1)*d)
    std::vector<GenerationReport> reports{root_report(d)};
    for (int g = 0; g < n_max; ++g) {
        const std::size_t z = current.size() / d;
        std::vector<std::uint32_t> draw(z);
        const RngStream gen_rng = rng.substream(static_cast<std::uint64_t>(g));
        const std::size_t chunks = std::min<std::size_t>(kChunks, z);
        parallel_for(chunks, [&](std::size_t c) {
            for (std::size_t i = z * c / chunks; i < z * (c + 1) / chunks; ++i) {
                RngStream r = gen_rng.substream(i);
                draw[i] = static_cast<std::uint32_t>(urn_step(r, weights, q, &current[i * d], g));
            }
        });
        std::int64_t next_size = 0;
        for (std::size_t i = 0; i < z; ++i) next_size = checked_add(next_size, nu.support()[draw[i]]);
        if (next_size > pop_cap) {
            reports.back().truncated = true;
            break;
        }
        std::vector<std::int64_t> next;
        next.reserve(static_cast<std::size_t>(next_size) * d);
        GenerationReport rep;
        rep.generation = g + 1;
        for (std::size_t i = 0; i < z; ++i) {
            const int children = nu.support()[draw[i]];
            if (children == 0) continue;
            CountKey child(current.begin() + static_cast<long>(i * d), current.begin() + static_cast<long>((i + 1) * d));
            ++child[draw[i]];
#ifndef NDEBUG
            if (!LineageState{child, g + 1}.consistent(nu.support())) throw NumericError("lineage invariant broken");
#endif
            rep.histogram[child] += children;
            for (int c = 0; c < children; ++c) next.insert(next.end(), child.begin(), child.end());
        }
        rep.population = next_size;
        rep.survived = next_size > 0;
        reports.push_back(std::move(rep));
        current.swap(next);
        if (next_size == 0) break;
    }
    return reports;
}

std::vector<GenerationReport> simulate_rgw_grouped(const OffspringLaw& nu, double q, int n_max, std::int64_t pop_cap,
                                                   const RngStream& rng) {
    check_memory_closed(q);
    if (n_max < 1) throw ContractError("n_max must be at least 1");
    if (pop_cap < 1) throw ContractError("pop_cap must be at least 1");
    const std::size_t d = nu.size();
    const std::vector<double> weights = law_weights(nu);

    std::map<CountKey, std::int64_t> groups{{CountKey(d, 0), 1}};
    std::vector<GenerationReport> reports{root_report(d)};
    for (int g = 0; g < n_max; ++g) {
        const RngStream gen_rng = rng.substream(static_cast<std::uint64_t>(g));
        std::map<CountKey, std::int64_t> next;
        std::int64_t total = 0;
        std::uint64_t index = 0;
        for (const auto& [key, size] : groups) {
            RngStream r = gen_rng.substream(index++);
            std::vector<std::int64_t> outcome(d, 0);
            std::int64_t copied = g > 0 ? static_cast<std::int64_t>(r.binomial(static_cast<std::uint64_t>(size), q)) : 0;
            if (copied > 0) {
                std::vector<double> lineage(d);
                for (std::size_t k = 0; k < d; ++k) lineage[k] = static_cast<double>(key[k]);
                auto m = multinomial(r, copied, lineage);
                for (std::size_t k = 0; k < d; ++k) outcome[k] += m[k];
            }
            auto fresh = multinomial(r, size - copied, weights);
            for (std::size_t k = 0; k < d; ++k) outcome[k] += fresh[k];
            for (std::size_t k = 0; k < d; ++k) {
                if (outcome[k] == 0 || nu.support()[k] == 0) continue;
                CountKey child = key;
                ++child[k];
                std::int64_t kids = checked_mul(outcome[k], nu.support()[k]);
                next[child] = checked_add(next[child], kids);
                total = checked_add(total, kids);
            }
        }
        if (total > pop_cap) {
            reports.back().truncated = true;
            break;
        }
        GenerationReport rep;
        rep.generation = g + 1;
        rep.population = total;
        rep.survived = total > 0;
        rep.histogram = next;
        reports.push_back(std::move(rep));
        groups.swap(next);
        if (total == 0) break;
    }
    return reports;
}

UrnRun simulate_urn(const OffspringLaw& nu, double q, int n, const RngStream& rng) {
    check_memory_closed(q);
    if (n < 1) throw ContractError("urn length must be at least 1");
    const std::vector<double> weights = law_weights(nu);
    RngStream r = rng;
    std::vector<int> seq;
    seq.reserve(static_cast<std::size_t>(n));
    std::vector<std::size_t> slots;
    slots.reserve(static_cast<std::size_t>(n));
    std::vector<std::int64_t> counts(nu.size(), 0);
    for (int i = 0; i < n; ++i) {
        // Duplicate a uniformly chosen ball already in the urn, or draw a fresh one.
        std::size_t k = i > 0 && q > 0.0 && r.uniform() < q ? slots[r.below(static_cast<std::uint64_t>(i))]
                                                          : r.categorical(weights);
        slots.push_back(k);
        seq.push_back(nu.support()[k]);
        ++counts[k];
    }
    return {std::move(seq), EmpiricalMeasure(nu.support(), std::move(counts))};
}

Estimate many_to_one_estimate(const OffspringLaw& nu, double q, int n, std::int64_t replicas,
                              const SimplexPredicate& target, const RngStream& rng) {
    check_memory_closed(q);
    if (n < 1) throw ContractError("generation must be at least 1");
    if (replicas < 1) throw ContractError("replicas must be at least 1");
    const std::size_t d = nu.size();
    const std::vector<double> weights = law_weights(nu);
    std::vector<double> values(static_cast<std::size_t>(replicas), 0.0);
    const auto total = static_cast<std::size_t>(replicas);
    parallel_for(kChunks, [&](std::size_t c) {
        std::vector<std::int64_t> counts(d);
        for (std::size_t rep = total * c / kChunks; rep < total * (c + 1) / kChunks; ++rep) {
            RngStream r = rng.substream(rep);
            std::fill(counts.begin(), counts.end(), 0);
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                std::size_t k = urn_step(r, weights, q, counts.data(), i);
                ++counts[k];
                w *= nu.support()[k];
                if (w == 0.0) break; // a childless ancestor ends the line
            }
            if (w != 0.0 && target) {
                std::vector<double> p(d);
                for (std::size_t k = 0; k < d; ++k) p[k] = static_cast<double>(counts[k]) / n;
                if (!target(ProbVector(nu.support(), std::move(p)))) w = 0.0;
            }
            values[rep] = w;
        }
    });
    return estimate_from(values);
}

std::map<CountKey, double> enumerate_expected_counts(const OffspringLaw& nu, double q, int n) {
    check_memory_closed(q);
    if (n < 1) throw ContractError("generation must be at least 1");
    const std::size_t d = nu.size();
    if (static_cast<double>(n) * std::log(static_cast<double>(d)) > std::log(1e7) + 1e-9)
        throw ContractError("enumeration guard: |S|^n exceeds 1e7");
    std::map<CountKey, double> out;
    CountKey counts(d, 0);
    std::function<void(int, double)> walk = [&](int i, double value) {
        if (i == n) {
            out[counts] += value;
            return;
        }
        for (std::size_t k = 0; k < d; ++k) {
            double p = i == 0 ? nu[k] : q * static_cast<double>(counts[k]) / i + (1.0 - q) * nu[k];
            double v = value * p * nu.support()[k];
            if (v == 0.0) continue;
            ++counts[k];
            walk(i + 1, v);
            --counts[k];
        }
    };
    walk(0, 1.0);
    return out;
}

std::map<CountKey, double> urn_expected_counts(const OffspringLaw& nu, double q, int n) { return urn_dp(nu, q, n, true); }

std::map<CountKey, double> urn_count_law(const OffspringLaw& nu, double q, int n) { return urn_dp(nu, q, n, false); }

double total_expected_count(const std::map<CountKey, double>& counts) {
    double s = 0.0;
    for (const auto& [k, v] : counts) s += v;
    return s;
}

double admissibility_residual(const OffspringLaw& nu, double q, const RealVector& a) {
    if (a.size() != nu.size()) throw ContractError("a must be aligned with the support of nu");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += nu[k] / (1.0 - q * a[k]);
    return s - 1.0 / (1.0 - q);
}

namespace {

void check_admissible(const OffspringLaw& nu, double q, const RealVector& a) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("memory parameter q must lie in (0,1)");
    if (a.size() != nu.size()) throw ContractError("a must be aligned with the support of nu");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] >= 0.0 && a[k] < 1.0 / q)) throw ContractError("a(k) must lie in [0, 1/q)");
        if (nu.support()[k] == 0 && a[k] != 0.0) throw ContractError("a(0) must be 0");
    }
}

} // namespace

SpineUrnRun simulate_spine_urn(const OffspringLaw& nu, double q, const RealVector& a, std::int64_t n,
                               const RngStream& rng) {
    check_admissible(nu, q, a);
    if (std::abs(admissibility_residual(nu, q, a)) > 1e-9)
        throw ContractError("a violates sum nu(j)/(1 - q a(j)) = 1/(1-q)");
    if (n < 1) throw ContractError("spine urn needs at least one step");
    const std::size_t d = nu.size();
    SpineUrnState st;
    st.balls.assign(d + 1, 0);
    st.activity.assign(d + 1, 0.0);
    std::vector<double> star_law(d);
    double star_mass = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        st.activity[k] = q * a[k];
        star_law[k] = a[k] * nu[k];
        star_mass += star_law[k];
    }
    st.activity[d] = (1.0 - q) * star_mass;
    RngStream r = rng;
    st.balls[r.categorical(law_weights(nu))] += 1;
    st.balls[d] += 1;
    std::vector<std::int64_t> added(d, 0);
    std::vector<double> weight(d + 1);
    for (std::int64_t step = 0; step < n; ++step) {
        for (std::size_t k = 0; k <= d; ++k) weight[k] = static_cast<double>(st.balls[k]) * st.activity[k];
        std::size_t j = r.categorical(weight);
        std::size_t colour = j < d ? j : r.categorical(star_law);
        ++st.balls[colour];
        ++st.balls[d];
        ++added[colour];
        ++st.steps;
    }
    std::vector<double> freq(d);
    for (std::size_t k = 0; k < d; ++k) freq[k] = static_cast<double>(added[k]) / static_cast<double>(n);
    return {ProbVector(nu.support(), std::move(freq)), std::move(st)};
}

SpectralReport replacement_matrix(const OffspringLaw& nu, double q, const RealVector& a, bool check) {
    check_admissible(nu, q, a);
    if (check && std::abs(admissibility_residual(nu, q, a)) > 1e-8)
        throw ContractError("a violates sum nu(j)/(1 - q a(j)) = 1/(1-q)");
    SpectralReport rep{Eigen::MatrixXd(), {}, 0.0, ProbVector(nu.support(), std::vector<double>(nu.size(), 1.0 / nu.size())), 0};
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < nu.size(); ++k)
        if (nu.support()[k] != 0) idx.push_back(k);
    const auto s = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s + 1, s + 1);
    double star = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
        std::size_t k = idx[static_cast<std::size_t>(i)];
        A(i, i) = q * a[k];
        A(i, s) = q * a[k];
        A(s, i) = (1.0 - q) * a[k] * nu[k];
        star += a[k] * nu[k];
        rep.labels.push_back(nu.support()[k]);
    }
    A(s, s) = (1.0 - q) * star;
    rep.labels.push_back(-1);
    rep.matrix = A;

    Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(s + 1, 1.0 / static_cast<double>(s + 1));
    double lambda = 0.0;
    bool converged = false;
    int it = 0;
    for (; it < 2'000'000; ++it) {
        Eigen::RowVectorXd w = v * A;
        double norm = w.sum();
        if (!(norm > 0.0)) throw NumericError("replacement matrix annihilates the iterate", 0.0, it);
        lambda = norm / v.sum();
        w /= norm;
        double change = (w - v).cwiseAbs().maxCoeff();
        v = w;
        if (change < 1e-16 || (it > 50 && change < 1e-15)) {
            converged = true;
            break;
        }
    }
    rep.iterations = it;
    if (!converged) throw NumericError("power iteration did not converge", 0.0, it);
    rep.eigenvalue = lambda;
    std::vector<double> pi(nu.size(), 0.0);
    double mass = v.head(s).sum();
    for (Eigen::Index i = 0; i < s; ++i) pi[idx[static_cast<std::size_t>(i)]] = v(i) / mass;
    rep.eigenvector = ProbVector(nu.support(), std::move(pi));
    return rep;
}

TwoTypeRun simulate_two_type(const OffspringLaw& nu, const OffspringLaw& nu_prime, int n_max, std::int64_t pop_cap,
                             const RngStream& rng) {
    if (n_max < 1) throw ContractError("n_max must be at least 1");
    if (pop_cap < 1) throw ContractError("pop_cap must be at least 1");
    TwoTypeRun run;
    Support shifted;
    for (int k : nu.support()) shifted.push_back(k + 1);
    run.merged_support = support_union(shifted, nu_prime.support());
    run.supercritical_warning = !(nu.mean() > 1.0 && nu_prime.mean() < 1.0);
    const std::size_t d = run.merged_support.size();
    auto slot = [&](int atom) {
        return static_cast<std::size_t>(std::lower_bound(run.merged_support.begin(), run.merged_support.end(), atom) -
                                        run.merged_support.begin());
    };
    const std::vector<double> w1 = law_weights(nu);
    const std::vector<double> w2 = law_weights(nu_prime);

    struct Individual {
        int type;
        CountKey counts;
    };
    std::vector<Individual> current{{1, CountKey(d, 0)}};
    auto report = [&](int g, const std::vector<Individual>& pop) {
        TwoTypeReport r;
        r.generation = g;
        for (const auto& ind : pop) {
            (ind.type == 1 ? r.type1 : r.type2) += 1;
            r.merged.histogram[ind.counts] += 1;
        }
        r.merged.generation = g;
        r.merged.population = static_cast<std::int64_t>(pop.size());
        r.merged.survived = !pop.empty();
        return r;
    };
    run.generations.push_back(report(0, current));
    for (int g = 0; g < n_max; ++g) {
        const RngStream gen_rng = rng.substream(static_cast<std::uint64_t>(g));
        std::vector<int> degree(current.size());
        std::int64_t next_size = 0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            RngStream r = gen_rng.substream(i);
            if (current[i].type == 1) {
                int k = nu.support()[r.categorical(w1)];
                degree[i] = k + 1; // k type-1 children and one type-2 child
            } else {
                degree[i] = nu_prime.support()[r.categorical(w2)];
            }
            next_size += degree[i];
        }
        if (next_size > pop_cap) {
            run.generations.back().merged.truncated = true;
            break;
        }
        std::vector<Individual> next;
        next.reserve(static_cast<std::size_t>(next_size));
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (degree[i] == 0) continue;
            CountKey child = current[i].counts;
            ++child[slot(degree[i])];
            if (current[i].type == 1) {
                for (int c = 0; c + 1 < degree[i]; ++c) next.push_back({1, child});
                next.push_back({2, child});
            } else {
                for (int c = 0; c < degree[i]; ++c) next.push_back({2, child});
            }
        }
        current.swap(next);
        run.generations.push_back(report(g + 1, current));
        if (current.empty()) break;
    }
    return run;
}

GibbsEstimate gibbs_conditional_estimate(const OffspringLaw& nu, double q, int n, const RealVector& w, double c,
                                         std::int64_t attempts, const RngStream& rng) {
    check_memory_closed(q);
    if (n < 1) throw ContractError("urn length must be at least 1");
    if (attempts < 1) throw ContractError("attempts must be at least 1");
    if (w.size() != nu.size()) throw ContractError("half-space normal must be aligned with the support");
    const std::size_t d = nu.size();
    const std::vector<double> weights = law_weights(nu);
    const auto total = static_cast<std::size_t>(attempts);
    std::vector<std::vector<double>> sum(kChunks, std::vector<double>(d, 0.0));
    std::vector<std::vector<double>> sq(kChunks, std::vector<double>(d, 0.0));
    std::vector<std::int64_t> accepted(kChunks, 0);
    parallel_for(kChunks, [&](std::size_t ch) {
        std::vector<std::int64_t> counts(d);
        for (std::size_t t = total * ch / kChunks; t < total * (ch + 1) / kChunks; ++t) {
            RngStream r = rng.substream(t);
            std::fill(counts.begin(), counts.end(), 0);
            for (int i = 0; i < n; ++i) ++counts[urn_step(r, weights, q, counts.data(), i)];
            if (!in_halfspace(counts, w, c, n)) continue;
            ++accepted[ch];
            for (std::size_t k = 0; k < d; ++k) {
                double x = static_cast<double>(counts[k]) / n;
                sum[ch][k] += x;
                sq[ch][k] += x * x;
            }
        }
    });
    std::int64_t acc = std::accumulate(accepted.begin(), accepted.end(), std::int64_t{0});
    if (acc == 0)
        throw StatisticalError("no urn run out of " + std::to_string(attempts) + " landed in the conditioning set", 0.0,
                               static_cast<int>(std::min<std::int64_t>(attempts, std::numeric_limits<int>::max())));
    std::vector<double> mean(d, 0.0);
    std::vector<double> m2(d, 0.0);
    for (std::size_t ch = 0; ch < kChunks; ++ch)
        for (std::size_t k = 0; k < d; ++k) {
            mean[k] += sum[ch][k];
            m2[k] += sq[ch][k];
        }
    std::vector<double> se(d, 0.0);
    const auto a = static_cast<double>(acc);
    for (std::size_t k = 0; k < d; ++k) {
        mean[k] /= a;
        double var = acc > 1 ? std::max(0.0, (m2[k] - a * mean[k] * mean[k]) / (a - 1.0)) : 0.0;
        se[k] = std::sqrt(var / a);
    }
    return {ProbVector(nu.support(), std::move(mean)), std::move(se), a / static_cast<double>(attempts), acc, attempts};
}

ExactConditional exact_conditional_mean(const OffspringLaw& nu, double q, int n, const RealVector& w, double c) {
    if (w.size() != nu.size()) throw ContractError("half-space normal must be aligned with the support");
    auto law = urn_count_law(nu, q, n);
    const std::size_t d = nu.size();
    std::vector<double> mean(d, 0.0);
    double mass = 0.0;
    for (const auto& [key, p] : law) {
        if (!in_halfspace(key, w, c, n)) continue;
        mass += p;
        for (std::size_t k = 0; k < d; ++k) mean[k] += p * static_cast<double>(key[k]) / n;
    }
    if (!(mass > 0.0)) throw InfeasibleError("conditioning set has probability zero");
    for (double& x : mean) x /= mass;
    return {ProbVector(nu.support(), std::move(mean)), mass};
}

PopulationSummary summarize_population(const OffspringLaw& nu, double q, int n, std::int64_t replicas,
                                       std::int64_t pop_cap, const RngStream& rng, Engine engine) {
    if (replicas < 1) throw ContractError("replicas must be at least 1");
    const auto total = static_cast<std::size_t>(replicas);
    std::vector<double> z(total, 0.0);
    std::vector<char> alive(total, 0);
    std::vector<char> cut(total, 0);
    parallel_for(kChunks, [&](std::size_t ch) {
        for (std::size_t rep = total * ch / kChunks; rep < total * (ch + 1) / kChunks; ++rep) {
            RngStream r = rng.substream(rep);
            auto reports = engine == Engine::Grouped ? simulate_rgw_grouped(nu, q, n, pop_cap, r)
                                                     : simulate_rgw(nu, q, n, pop_cap, r);
            const auto& last = reports.back();
            if (last.truncated) {
                cut[rep] = 1;
                alive[rep] = 1;
            } else if (last.generation == n) {
                z[rep] = static_cast<double>(last.population);
                alive[rep] = last.population > 0;
            }
        }
    });
    PopulationSummary s;
    std::vector<double> kept;
    kept.reserve(total);
    std::int64_t survivors = 0;
    for (std::size_t i = 0; i < total; ++i) {
        survivors += alive[i];
        s.truncated += cut[i];
        if (!cut[i]) kept.push_back(z[i]);
    }
    s.population = estimate_from(kept);
    s.survival_fraction = static_cast<double>(survivors) / static_cast<double>(total);
    return s;
}

} // namespace rgw
