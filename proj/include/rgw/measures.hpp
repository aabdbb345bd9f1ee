#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgw/extended_real.hpp"

namespace rgw {

/// Strictly increasing list of non-negative offspring numbers.
using Support = std::vector<int>;

/// Plain real vector aligned atom-by-atom with some Support.
using RealVector = std::vector<double>;

/// Slack allowed on the total mass of a probability vector before it is rejected.
inline constexpr double kMassTolerance = 1e-12;

void validate_support(const Support& support);
Support support_union(const Support& a, const Support& b);

/// Probability vector on a fixed support; atoms may carry zero mass.
class ProbVector {
  public:
    ProbVector(Support support, std::vector<double> weights);

    static ProbVector dirac(Support support, int atom);
    static ProbVector uniform(Support support);

    const Support& support() const noexcept { return support_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

    /// Mass at offspring number k (0 when k is not in the support).
    double mass_at(int k) const;
    int index_of(int k) const;
    bool strictly_positive() const;

    std::string key(char sep = ':') const;

    friend bool operator==(const ProbVector&, const ProbVector&) = default;

  private:
    Support support_;
    std::vector<double> weights_;
};

/// Finitely supported reproduction law. Zero-weight atoms are dropped.
class OffspringLaw {
  public:
    OffspringLaw(Support support, std::vector<double> probs);

    const Support& support() const noexcept { return support_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    double prob(int k) const;

    bool has_zero() const noexcept { return support_.front() == 0; }
    int max_atom() const noexcept { return support_.back(); }
    double mean() const;

    /// S minus {0} has at most one element. Accepted, but worth a diagnostic.
    bool positive_part_is_singleton() const;

    ProbVector as_prob_vector() const { return ProbVector(support_, weights_); }

  private:
    Support support_;
    std::vector<double> weights_;
};

/// Integer histogram of observed atoms.
class EmpiricalMeasure {
  public:
    EmpiricalMeasure(Support support, std::vector<std::int64_t> counts);

    const Support& support() const noexcept { return support_; }
    std::span<const std::int64_t> counts() const noexcept { return counts_; }
    std::int64_t total() const noexcept { return total_; }
    ProbVector normalized() const;
    std::string key(char sep = ':') const;

  private:
    Support support_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Vector in [-inf, inf)^S, e.g. the argument of a log-moment generating function.
class LogWeights {
  public:
    LogWeights(Support support, std::vector<double> values);

    /// The vector k -> log k, with log 0 = -inf.
    static LogWeights log_of_atoms(const Support& support);
    static LogWeights zeros(const Support& support);

    const Support& support() const noexcept { return support_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool all_minus_infinity() const;
    /// Largest finite entry; -inf for the all-(-inf) sentinel.
    double max_entry() const;
    LogWeights shifted(double c) const;

  private:
    Support support_;
    std::vector<double> values_;
};

/// Re-express a probability vector on a larger support, zero filled.
ProbVector align(const ProbVector& rho, const Support& target);

ExtendedReal relative_entropy(const ProbVector& rho, const ProbVector& nu);
ExtendedReal relative_entropy(const ProbVector& rho, const OffspringLaw& nu);

/// sum_k rho(k) lam(k), with 0 * (-inf) = 0.
ExtendedReal pair(const ProbVector& rho, const LogWeights& lam);

ProbVector size_bias(const OffspringLaw& nu);
double mean(const ProbVector& rho);
ProbVector mix(double q, const ProbVector& rho, const ProbVector& nu);
double linf_distance(const ProbVector& a, const ProbVector& b);

} // namespace rgw
