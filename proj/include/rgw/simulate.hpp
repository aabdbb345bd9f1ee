#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "rgw/measures.hpp"
#include "rgw/rng.hpp"

namespace rgw {

/// Integer count vector aligned with a support.
using CountKey = std::vector<std::int64_t>;

/// Ancestral out-degree counts of one individual; counts sum to its generation.
struct LineageState {
    CountKey counts;
    int generation = 0;

    /// counts.total == generation and nothing recorded on the atom 0 (if present).
    bool consistent(const Support& support) const;
};

struct GenerationReport {
    int generation = 0;
    std::int64_t population = 0;
    /// Exact histogram of lineage count vectors; masses add up to population.
    std::map<CountKey, std::int64_t> histogram;
    bool survived = false;
    bool truncated = false;
};

inline constexpr std::int64_t kDefaultPopulationCap = 10'000'000;

/// Reinforced Galton-Watson tree, one individual at a time. Each individual's draw uses the
/// substream (generation, index), so the output does not depend on the number of threads.
std::vector<GenerationReport> simulate_rgw(const OffspringLaw& nu, double q, int n_max,
                                           std::int64_t pop_cap, const RngStream& rng);

/// Same law as simulate_rgw, but exchangeable individuals (equal count vectors) are advanced
/// together with binomial and multinomial draws. Suited to large populations.
std::vector<GenerationReport> simulate_rgw_grouped(const OffspringLaw& nu, double q, int n_max,
                                                   std::int64_t pop_cap, const RngStream& rng);

struct UrnRun {
    std::vector<int> sequence;
    EmpiricalMeasure counts;
};

/// Reinforced Polya urn: xi_1 ~ nu, then copy a uniform earlier ball with probability q,
/// otherwise draw afresh from nu.
UrnRun simulate_urn(const OffspringLaw& nu, double q, int n, const RngStream& rng);

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::int64_t samples = 0;
};

/// Predicate on the empirical law L_n; an empty function accepts everything.
using SimplexPredicate = std::function<bool(const ProbVector&)>;

/// Unbiased estimate of E_q #{v : |v| = n, mu_v in target} from reinforced sequences
/// weighted by prod xi_i.
Estimate many_to_one_estimate(const OffspringLaw& nu, double q, int n, std::int64_t replicas,
                              const SimplexPredicate& target, const RngStream& rng);

/// Exact expected counts by brute force over S^n (|S|^n <= 1e7).
std::map<CountKey, double> enumerate_expected_counts(const OffspringLaw& nu, double q, int n);

/// Same quantity as enumerate_expected_counts, by dynamic programming over count states.
std::map<CountKey, double> urn_expected_counts(const OffspringLaw& nu, double q, int n);

/// Law of the count vector of the reinforced urn after n draws, by dynamic programming.
std::map<CountKey, double> urn_count_law(const OffspringLaw& nu, double q, int n);

double total_expected_count(const std::map<CountKey, double>& counts);

struct SpineUrnState {
    /// Ball counts per atom of S, then the star color last.
    std::vector<std::int64_t> balls;
    std::vector<double> activity;
    std::int64_t steps = 0;
};

struct SpineUrnRun {
    ProbVector frequencies;
    SpineUrnState state;
};

/// Residual of sum nu(j)/(1 - q a(j)) = 1/(1 - q).
double admissibility_residual(const OffspringLaw& nu, double q, const RealVector& a);

/// Star-colored urn; frequencies of the n non-star balls added.
SpineUrnRun simulate_spine_urn(const OffspringLaw& nu, double q, const RealVector& a, std::int64_t n,
                               const RngStream& rng);

struct SpectralReport {
    Eigen::MatrixXd matrix;          // rows/cols: atoms of S with a > 0, then star
    std::vector<int> labels;         // atom for each row; -1 for star
    double eigenvalue = 0.0;
    ProbVector eigenvector;          // left eigenvector restricted to S, normalized
    int iterations = 0;
};

SpectralReport replacement_matrix(const OffspringLaw& nu, double q, const RealVector& a, bool check_admissible = true);

struct TwoTypeReport {
    int generation = 0;
    std::int64_t type1 = 0;
    std::int64_t type2 = 0;
    /// Lineage histograms over the merged support (type-1 degrees shifted by +1).
    GenerationReport merged;
};

struct TwoTypeRun {
    Support merged_support;
    std::vector<TwoTypeReport> generations;
    bool supercritical_warning = false;
};

TwoTypeRun simulate_two_type(const OffspringLaw& nu, const OffspringLaw& nu_prime, int n_max, std::int64_t pop_cap,
                             const RngStream& rng);

struct GibbsEstimate {
    ProbVector mean;
    std::vector<double> standard_error;
    double acceptance_rate = 0.0;
    std::int64_t accepted = 0;
    std::int64_t attempts = 0;
};

/// Rejection sampling of urn runs with <L_n, w> >= c.
GibbsEstimate gibbs_conditional_estimate(const OffspringLaw& nu, double q, int n, const RealVector& w, double c,
                                         std::int64_t attempts, const RngStream& rng);

/// The same conditional mean computed exactly from urn_count_law; also returns P(L_n in Gamma).
struct ExactConditional {
    ProbVector mean;
    double probability = 0.0;
};
ExactConditional exact_conditional_mean(const OffspringLaw& nu, double q, int n, const RealVector& w, double c);

/// Population statistics at generation n over independent replicas.
struct PopulationSummary {
    Estimate population;
    double survival_fraction = 0.0;
    std::int64_t truncated = 0;
};

enum class Engine { PerIndividual, Grouped };

PopulationSummary summarize_population(const OffspringLaw& nu, double q, int n, std::int64_t replicas,
                                       std::int64_t pop_cap, const RngStream& rng, Engine engine);

} // namespace rgw
