#include "rgw/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgw/classify.hpp"
#include "rgw/control.hpp"
#include "rgw/errors.hpp"
#include "rgw/law_json.hpp"
#include "rgw/parallel.hpp"
#include "rgw/rate.hpp"
#include "rgw/simulate.hpp"
#include "rgw/survival.hpp"
#include "rgw/verify.hpp"

namespace rgw::cli {

namespace {

// Stream tags so that different subcommands never share random numbers for the same seed.
constexpr std::uint64_t kSimulateStream = 0x73696d;
constexpr std::uint64_t kUrnStream = 0x75726e;
constexpr std::uint64_t kSpineStream = 0x7370696e65;
constexpr std::uint64_t kTwoTypeStream = 0x74776f;
constexpr std::uint64_t kGibbsStream = 0x6769626273;

// Replicas formatted together before being written in order.
constexpr std::size_t kReplicaBlock = 1024;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* boolean(bool b) { return b ? "true" : "false"; }

std::string join_counts(const CountKey& key) {
    std::string s;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) s += ':';
        s += std::to_string(key[i]);
    }
    return s;
}

class Sink {
  public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw ContractError("cannot open output file " + path);
        os_ = &file_;
    }
    std::ostream& operator*() { return *os_; }
    void finish() {
        os_->flush();
        if (!*os_) throw std::runtime_error("write failed");
    }

  private:
    std::ofstream file_;
    std::ostream* os_;
};

OffspringLaw read_law(const std::string& arg) { return law_from_json(load_json_argument(arg)); }

double read_q(const std::string& text, bool allow_zero) {
    double q = parse_real(text);
    if (allow_zero ? !(q >= 0.0 && q < 1.0) : !(q > 0.0 && q < 1.0))
        throw ContractError(allow_zero ? "q must lie in [0,1)" : "q must lie in (0,1)");
    return q;
}

RealVector read_vector(const std::string& arg) {
    nlohmann::json j = load_json_argument(arg);
    if (!j.is_array()) throw ContractError("expected a JSON array of numbers");
    RealVector v;
    for (const auto& e : j) v.push_back(e.is_string() ? parse_real(e.get<std::string>()) : e.get<double>());
    return v;
}

// Grid of step `mesh` on [0,1]; the step must divide 1.
int grid_points(double mesh) {
    if (!(mesh > 0.0 && mesh <= 1.0)) throw ContractError("grid mesh must lie in (0,1]");
    long n = std::lround(1.0 / mesh);
    if (n < 1 || std::abs(n * mesh - 1.0) > 1e-9) throw ContractError("grid mesh must divide 1");
    if (n > 1'000'000) throw ContractError("grid mesh too fine");
    return static_cast<int>(n);
}

// All compositions of n into d parts, as probability vectors on the support.
std::vector<ProbVector> simplex_lattice(const Support& s, int n) {
    const std::size_t d = s.size();
    double count = 1.0;
    for (std::size_t i = 1; i < d; ++i) count = count * (n + static_cast<double>(i)) / static_cast<double>(i);
    if (count > 1e6) throw ContractError("simplex lattice exceeds 10^6 points; use a coarser mesh");
    std::vector<ProbVector> out;
    std::vector<int> parts(d, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos + 1 == d) {
            parts[pos] = left;
            std::vector<double> w(d);
            for (std::size_t i = 0; i < d; ++i) w[i] = static_cast<double>(parts[i]) / n;
            out.emplace_back(s, std::move(w));
            return;
        }
        for (int v = left; v >= 0; --v) {
            parts[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, n);
    return out;
}

// Formats blocks of replicas in parallel and writes them in replica order.
void write_replicas(std::ostream& os, std::int64_t replicas, const std::function<std::string(std::int64_t)>& row) {
    if (replicas < 1) throw ContractError("replicas must be at least 1");
    std::vector<std::string> block;
    for (std::int64_t base = 0; base < replicas; base += static_cast<std::int64_t>(kReplicaBlock)) {
        const auto count = static_cast<std::size_t>(std::min<std::int64_t>(kReplicaBlock, replicas - base));
        block.assign(count, std::string());
        parallel_for(count, [&](std::size_t i) { block[i] = row(base + static_cast<std::int64_t>(i)); });
        for (const auto& s : block) os << s;
    }
}

void append_histogram_rows(std::string& s, const std::string& prefix, const std::map<CountKey, std::int64_t>& hist) {
    if (hist.empty()) {
        s += prefix + ",,0\n";
        return;
    }
    for (const auto& [key, count] : hist) s += prefix + "," + join_counts(key) + "," + std::to_string(count) + "\n";
}

// ---------------------------------------------------------------- subcommands

struct RateArgs {
    std::string law, q, rho, out;
    double grid = 0.0;
};

void cmd_rate(const RateArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, true);
    std::vector<ProbVector> rhos;
    if (!a.rho.empty()) {
        rhos.push_back(prob_vector_from_json(load_json_argument(a.rho)));
    } else {
        if (nu.size() != 2) throw ContractError("--grid needs a law on two atoms; use --rho otherwise");
        int n = grid_points(a.grid);
        for (int i = 0; i <= n; ++i) {
            double p = static_cast<double>(i) / n;
            rhos.emplace_back(nu.support(), std::vector<double>{p, 1.0 - p});
        }
    }
    const bool closed = nu.size() == 2 && std::abs(nu[0] - 0.5) < 1e-12 && std::abs(q - 1.0 / 3.0) < 1e-9;
    std::vector<std::string> rows(rhos.size());
    parallel_for(rhos.size(), [&](std::size_t i) {
        const ProbVector& rho = rhos[i];
        if (!a.rho.empty() && nu.size() != 2) {
            rows[i] = rho.key();
        } else {
            rows[i] = num(align(rho, nu.support())[0]);
        }
        double star, h;
        if (q == 0.0) {
            star = lambda0_star(rho, nu).value();
            h = star;
        } else {
            auto [r, n] = std::pair{align(rho, support_union(rho.support(), nu.support())),
                                    align(nu.as_prob_vector(), support_union(rho.support(), nu.support()))};
            h = relative_entropy(r, mix(q, r, n)).value();
            bool outside = false;
            for (std::size_t k = 0; k < rho.size(); ++k)
                outside = outside || (rho[k] > 0.0 && nu.prob(rho.support()[k]) == 0.0);
            star = outside ? std::numeric_limits<double>::infinity() : lambda_q_star(align(rho, nu.support()), nu, q).value;
        }
        rows[i] += std::string(",") + boolean(closed) + "," + num(star) + "," + num(h) + "," + num(-std::log(q)) + "\n";
    });
    Sink sink(a.out, fallback);
    *sink << "p,rate_closed_form_available,lambda_star,upper_bound_H,neg_log_q\n";
    for (const auto& r : rows) *sink << r;
    sink.finish();
}

struct ClassifyArgs {
    std::string law, q, rho, out;
    double grid = 0.0;
};

void cmd_classify(const ClassifyArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, true);
    std::vector<ProbVector> rhos;
    if (!a.rho.empty()) rhos.push_back(prob_vector_from_json(load_json_argument(a.rho)));
    else rhos = simplex_lattice(nu.support(), grid_points(a.grid));
    std::vector<std::string> rows(rhos.size());
    parallel_for(rhos.size(), [&](std::size_t i) {
        Verdict v = q == 0.0 ? classify_gw(rhos[i], nu) : classify_rgw(rhos[i], nu, q);
        rows[i] = rhos[i].key() + "," + to_string(v.kind) + "," + num(v.margin_evanescence) + "," +
                  num(v.margin_persistence) + "," + boolean(v.subcritical_flag) + "\n";
    });
    Sink sink(a.out, fallback);
    *sink << "rho_key,kind,margin_evanescence,margin_persistence,subcritical_flag\n";
    for (const auto& r : rows) *sink << r;
    sink.finish();
}

struct SimulateArgs {
    std::string law, q, out, engine = "per-individual";
    int n_max = 10;
    std::int64_t pop_cap = kDefaultPopulationCap;
    std::int64_t replicas = 1;
    std::uint64_t seed = 42;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, true);
    if (a.engine != "per-individual" && a.engine != "grouped") throw ContractError("--engine must be per-individual or grouped");
    const bool grouped = a.engine == "grouped";
    const RngStream base(a.seed, kSimulateStream);
    Sink sink(a.out, fallback);
    *sink << "replica,generation,population,survived,truncated,hist_key,hist_count\n";
    write_replicas(*sink, a.replicas, [&](std::int64_t rep) {
        RngStream r = base.substream(static_cast<std::uint64_t>(rep));
        auto reports = grouped ? simulate_rgw_grouped(nu, q, a.n_max, a.pop_cap, r) : simulate_rgw(nu, q, a.n_max, a.pop_cap, r);
        std::string s;
        for (const auto& g : reports) {
            std::string prefix = std::to_string(rep) + "," + std::to_string(g.generation) + "," + std::to_string(g.population) +
                                 "," + boolean(g.survived) + "," + boolean(g.truncated);
            append_histogram_rows(s, prefix, g.histogram);
        }
        return s;
    });
    sink.finish();
}

struct UrnArgs {
    std::string law, q, out;
    int n = 1000;
    std::int64_t replicas = 1;
    std::uint64_t seed = 42;
};

void cmd_urn(const UrnArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, true);
    const RngStream base(a.seed, kUrnStream);
    Sink sink(a.out, fallback);
    *sink << "replica,n,hist_key,linf_to_nu\n";
    write_replicas(*sink, a.replicas, [&](std::int64_t rep) {
        UrnRun run = simulate_urn(nu, q, a.n, base.substream(static_cast<std::uint64_t>(rep)));
        return std::to_string(rep) + "," + std::to_string(a.n) + "," + run.counts.key() + "," +
               num(linf_distance(run.counts.normalized(), nu.as_prob_vector())) + "\n";
    });
    sink.finish();
}

struct SpineArgs {
    std::string law, q, a, rho, out;
    std::int64_t n = 1'000'000;
    std::uint64_t seed = 42;
};

void cmd_spine(const SpineArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, false);
    RealVector vec = a.a.empty() ? a_from_rho(prob_vector_from_json(load_json_argument(a.rho)), nu, q) : read_vector(a.a);
    PersistenceTarget target = pi_from_a(vec, nu, q);
    SpineUrnRun run = simulate_spine_urn(nu, q, vec, a.n, RngStream(a.seed, kSpineStream));
    SpectralReport spec = replacement_matrix(nu, q, vec);
    Sink sink(a.out, fallback);
    *sink << "atom,a,frequency,pi_a,eigenvector,eigenvalue\n";
    for (std::size_t k = 0; k < nu.size(); ++k)
        *sink << nu.support()[k] << "," << num(vec[k]) << "," << num(run.frequencies[k]) << "," << num(target.pi[k]) << ","
              << num(spec.eigenvector[k]) << "," << num(spec.eigenvalue) << "\n";
    sink.finish();
}

struct TwoTypeArgs {
    std::string law, law_prime, out;
    int n_max = 10;
    std::int64_t pop_cap = kDefaultPopulationCap;
    std::int64_t replicas = 1;
    std::uint64_t seed = 42;
};

void cmd_two_type(const TwoTypeArgs& a, std::ostream& fallback, std::ostream& err) {
    const OffspringLaw nu = read_law(a.law);
    const OffspringLaw nu_prime = read_law(a.law_prime);
    const RngStream base(a.seed, kTwoTypeStream);
    if (!(nu.mean() > 1.0 && nu_prime.mean() < 1.0))
        err << "warning: the two-type criterion expects m_nu > 1 and m_nu' < 1\n";
    Sink sink(a.out, fallback);
    *sink << "replica,generation,type1,type2,hist_key,hist_count\n";
    write_replicas(*sink, a.replicas, [&](std::int64_t rep) {
        TwoTypeRun run = simulate_two_type(nu, nu_prime, a.n_max, a.pop_cap, base.substream(static_cast<std::uint64_t>(rep)));
        std::string s;
        for (const auto& g : run.generations) {
            std::string prefix = std::to_string(rep) + "," + std::to_string(g.generation) + "," + std::to_string(g.type1) +
                                 "," + std::to_string(g.type2);
            append_histogram_rows(s, prefix, g.merged.histogram);
        }
        return s;
    });
    sink.finish();
}

struct GibbsArgs {
    std::string law, q, w, c, out;
    int n = 40;
    std::int64_t attempts = 100000;
    std::uint64_t seed = 42;
    bool exact = false;
};

void cmd_gibbs(const GibbsArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, false);
    const RealVector w = read_vector(a.w);
    const double c = parse_real(a.c);
    GibbsEstimate est = gibbs_conditional_estimate(nu, q, a.n, w, c, a.attempts, RngStream(a.seed, kGibbsStream));
    HalfspaceMinimum opt = argmin_rate_over_halfspace(nu, q, w, c);
    std::optional<ExactConditional> exact;
    if (a.exact) exact = exact_conditional_mean(nu, q, a.n, w, c);
    Sink sink(a.out, fallback);
    *sink << "atom,conditional_mean,standard_error,acceptance_rate,argmin_rate" << (exact ? ",exact_mean" : "") << "\n";
    for (std::size_t k = 0; k < nu.size(); ++k) {
        *sink << nu.support()[k] << "," << num(est.mean[k]) << "," << num(est.standard_error[k]) << ","
              << num(est.acceptance_rate) << "," << num(opt.minimizer[k]);
        if (exact) *sink << "," << num(exact->mean[k]);
        *sink << "\n";
    }
    sink.finish();
}

struct SurvivalArgs {
    std::string law, q, q_grid, out;
};

std::vector<double> parse_q_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ContractError("--q-grid expects a:b:step");
    const double lo = parse_real(parts[0]);
    const double hi = parse_real(parts[1]);
    const double step = parse_real(parts[2]);
    if (!(step > 0.0) || !(lo <= hi)) throw ContractError("--q-grid needs a <= b and step > 0");
    if ((hi - lo) / step > 1e6) throw ContractError("--q-grid has more than 10^6 points");
    std::vector<double> out;
    for (long i = 0;; ++i) {
        double x = lo + static_cast<double>(i) * step;
        if (x > hi + 1e-12 * std::max(1.0, std::abs(hi))) break;
        out.push_back(std::min(x, hi));
    }
    return out;
}

void cmd_survival(const SurvivalArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    std::vector<double> qs;
    if (!a.q.empty()) qs.push_back(read_q(a.q, false));
    else qs = parse_q_grid(a.q_grid);
    for (double q : qs)
        if (!(q > 0.0 && q < 1.0)) throw ContractError("every q must lie in (0,1)");
    std::vector<std::string> rows(qs.size());
    parallel_for(qs.size(), [&](std::size_t i) {
        SurvivalReport r = solve_survival_minimizer(nu, qs[i]);
        rows[i] = num(qs[i]) + "," + num(r.C) + "," + num(r.J_min) + "," + num(r.J_baseline) + "," +
                  boolean(r.survives_certified) + "," + boolean(r.trivially_survives) + "\n";
    });
    Sink sink(a.out, fallback);
    *sink << "q,C,J_min,J_baseline,survives_certified,trivially_survives\n";
    for (const auto& r : rows) *sink << r;
    sink.finish();
}

struct VerifyArgs {
    bool quick = false, full = false;
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_verify(const VerifyArgs& a, std::ostream& fallback) {
    if (a.quick && a.full) throw ContractError("choose one of --quick and --full");
    VerifyReport rep = verify_suite(a.full ? VerifyLevel::Full : VerifyLevel::Quick, a.seed);
    Sink sink(a.out, fallback);
    *sink << rep.to_json().dump(2) << "\n";
    sink.finish();
    return rep.passed() ? kOk : kVerifyFailed;
}

struct ControlArgs {
    std::string law = R"({"support":[1,2],"probs":[0.5,0.5]})", q = "1/3", rho, out;
    int m = 64;
    int restarts = 8;
    std::uint64_t seed = 42;
};

void cmd_verify_control(const ControlArgs& a, std::ostream& fallback) {
    const OffspringLaw nu = read_law(a.law);
    const double q = read_q(a.q, false);
    const ProbVector rho = align(prob_vector_from_json(load_json_argument(a.rho)), nu.support());
    ControlOptions opt;
    opt.restarts = a.restarts;
    opt.seed = a.seed;
    ControlResult res = solve_control(rho, nu, q, a.m, opt);
    const double dual = lambda_q_star(rho, nu, q).value;
    const double bound = relative_entropy(rho, mix(q, rho, nu.as_prob_vector())).value();
    std::string path = "step";
    for (int k : nu.support()) path += ",eta_" + std::to_string(k);
    path += "\n";
    for (int i = 0; i < res.best_path.steps(); ++i) {
        path += std::to_string(i + 1);
        for (std::size_t k = 0; k < nu.size(); ++k) path += "," + num(res.best_path.controls()[static_cast<std::size_t>(i)][k]);
        path += "\n";
    }
    nlohmann::json j;
    j["value"] = res.value;
    j["gap_to_dual"] = res.value - dual;
    j["gap_to_upper_bound"] = bound - res.value;
    j["best_path"] = path;
    Sink sink(a.out, fallback);
    *sink << j.dump(2) << "\n";
    sink.finish();
}

void add_out(CLI::App* sub, std::string& out) { sub->add_option("--out", out, "Output file (default: standard output)"); }

void add_seed(CLI::App* sub, std::uint64_t& seed) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rate functions, simulation and classification for reinforced Galton-Watson processes", "rgw"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (RGW_THREADS takes precedence)");

    RateArgs rate;
    auto* s_rate = app.add_subcommand("rate", "Rate function and upper bound over a grid of rho");
    s_rate->add_option("--law", rate.law, "Reproduction law (JSON text or file)")->required();
    s_rate->add_option("--q", rate.q, "Memory parameter, decimal or ratio")->required();
    auto* rate_grid = s_rate->add_option("--grid", rate.grid, "Grid step in p for two-atom laws");
    auto* rate_rho = s_rate->add_option("--rho", rate.rho, "Single rho (JSON)");
    rate_grid->excludes(rate_rho);
    add_out(s_rate, rate.out);

    ClassifyArgs cls;
    auto* s_cls = app.add_subcommand("classify", "Evanescent / persistent verdicts");
    s_cls->add_option("--law", cls.law, "Reproduction law (JSON text or file)")->required();
    s_cls->add_option("--q", cls.q, "Memory parameter; 0 gives the plain Galton-Watson test")->required();
    auto* cls_grid = s_cls->add_option("--grid", cls.grid, "Simplex lattice step");
    auto* cls_rho = s_cls->add_option("--rho", cls.rho, "Single rho (JSON)");
    cls_grid->excludes(cls_rho);
    add_out(s_cls, cls.out);

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "Simulate the reinforced Galton-Watson tree");
    s_sim->add_option("--law", sim.law, "Reproduction law (JSON text or file)")->required();
    s_sim->add_option("--q", sim.q, "Memory parameter")->required();
    s_sim->add_option("--n-max", sim.n_max, "Generations")->capture_default_str();
    s_sim->add_option("--pop-cap", sim.pop_cap, "Population cap per generation")->capture_default_str();
    s_sim->add_option("--replicas", sim.replicas, "Independent replicas")->capture_default_str();
    s_sim->add_option("--engine", sim.engine, "per-individual or grouped")->capture_default_str();
    add_seed(s_sim, sim.seed);
    add_out(s_sim, sim.out);

    UrnArgs urn;
    auto* s_urn = app.add_subcommand("urn", "Reinforced Polya urn runs");
    s_urn->add_option("--law", urn.law, "Reproduction law (JSON text or file)")->required();
    s_urn->add_option("--q", urn.q, "Memory parameter")->required();
    s_urn->add_option("--n", urn.n, "Draws per run")->capture_default_str();
    s_urn->add_option("--replicas", urn.replicas, "Independent runs")->capture_default_str();
    add_seed(s_urn, urn.seed);
    add_out(s_urn, urn.out);

    SpineArgs spine;
    auto* s_spine = app.add_subcommand("spine", "Star-colored spine urn and its replacement matrix");
    s_spine->add_option("--law", spine.law, "Reproduction law (JSON text or file)")->required();
    s_spine->add_option("--q", spine.q, "Memory parameter")->required();
    auto* spine_a = s_spine->add_option("--a", spine.a, "Admissible a as a JSON array aligned with the support");
    auto* spine_rho = s_spine->add_option("--rho", spine.rho, "Target rho; a is derived from it");
    spine_a->excludes(spine_rho);
    s_spine->add_option("--n", spine.n, "Balls added")->capture_default_str();
    add_seed(s_spine, spine.seed);
    add_out(s_spine, spine.out);

    TwoTypeArgs two;
    auto* s_two = app.add_subcommand("two-type", "Two-type benchmark process");
    s_two->add_option("--law", two.law, "Type-1 law")->required();
    s_two->add_option("--law-prime", two.law_prime, "Type-2 law")->required();
    s_two->add_option("--n-max", two.n_max, "Generations")->capture_default_str();
    s_two->add_option("--pop-cap", two.pop_cap, "Population cap per generation")->capture_default_str();
    s_two->add_option("--replicas", two.replicas, "Independent replicas")->capture_default_str();
    add_seed(s_two, two.seed);
    add_out(s_two, two.out);

    GibbsArgs gibbs;
    auto* s_gibbs = app.add_subcommand("gibbs", "Urn conditioned on a half-space of empirical laws");
    s_gibbs->add_option("--law", gibbs.law, "Reproduction law (JSON text or file)")->required();
    s_gibbs->add_option("--q", gibbs.q, "Memory parameter")->required();
    s_gibbs->add_option("--w", gibbs.w, "Half-space normal, JSON array aligned with the support")->required();
    s_gibbs->add_option("--c", gibbs.c, "Half-space level: <L_n, w> >= c")->required();
    s_gibbs->add_option("--n", gibbs.n, "Urn length")->capture_default_str();
    s_gibbs->add_option("--attempts", gibbs.attempts, "Rejection-sampling attempts")->capture_default_str();
    s_gibbs->add_flag("--exact", gibbs.exact, "Add the exact conditional mean column");
    add_seed(s_gibbs, gibbs.seed);
    add_out(s_gibbs, gibbs.out);

    SurvivalArgs surv;
    auto* s_surv = app.add_subcommand("survival", "Survival criterion min J over the admissible set");
    s_surv->add_option("--law", surv.law, "Reproduction law (JSON text or file)")->required();
    auto* surv_q = s_surv->add_option("--q", surv.q, "Memory parameter");
    auto* surv_grid = s_surv->add_option("--q-grid", surv.q_grid, "Sweep a:b:step");
    surv_q->excludes(surv_grid);
    add_out(s_surv, surv.out);

    VerifyArgs ver;
    auto* s_ver = app.add_subcommand("verify", "Cross-module oracle checks");
    s_ver->require_subcommand(0, 1);
    s_ver->add_flag("--quick", ver.quick, "Reduced suite (default)");
    s_ver->add_flag("--full", ver.full, "Full-size campaigns");
    add_seed(s_ver, ver.seed);
    add_out(s_ver, ver.out);
    ControlArgs ctl;
    auto* s_ctl = s_ver->add_subcommand("control", "Discretized control problem against the dual rate");
    s_ctl->add_option("--rho", ctl.rho, "Target rho (JSON)")->required();
    s_ctl->add_option("--law", ctl.law, "Reproduction law")->capture_default_str();
    s_ctl->add_option("--q", ctl.q, "Memory parameter")->capture_default_str();
    s_ctl->add_option("--m", ctl.m, "Steps")->capture_default_str();
    s_ctl->add_option("--restarts", ctl.restarts, "Random restarts")->capture_default_str();
    add_seed(s_ctl, ctl.seed);
    add_out(s_ctl, ctl.out);

    std::vector<const char*> argv{"rgw"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kValidation;
    }

    try {
        if (std::getenv("RGW_THREADS") == nullptr && threads > 0) set_default_threads(threads);
        if (s_rate->parsed()) {
            if (rate.rho.empty() && rate_grid->count() == 0) throw ContractError("rate needs --grid or --rho");
            cmd_rate(rate, out);
        } else if (s_cls->parsed()) {
            if (cls.rho.empty() && cls_grid->count() == 0) throw ContractError("classify needs --grid or --rho");
            cmd_classify(cls, out);
        } else if (s_sim->parsed()) {
            cmd_simulate(sim, out);
        } else if (s_urn->parsed()) {
            cmd_urn(urn, out);
        } else if (s_spine->parsed()) {
            if (spine.a.empty() && spine.rho.empty()) throw ContractError("spine needs --a or --rho");
            cmd_spine(spine, out);
        } else if (s_two->parsed()) {
            cmd_two_type(two, out, err);
        } else if (s_gibbs->parsed()) {
            cmd_gibbs(gibbs, out);
        } else if (s_surv->parsed()) {
            if (surv.q.empty() && surv.q_grid.empty()) throw ContractError("survival needs --q or --q-grid");
            cmd_survival(surv, out);
        } else if (s_ctl->parsed()) {
            cmd_verify_control(ctl, out);
        } else if (s_ver->parsed()) {
            return cmd_verify(ver, out);
        }
        return kOk;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid JSON input: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kNumeric;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace rgw::cli
