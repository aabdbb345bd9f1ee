#include "rgw/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(const Support& s) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << '}';
    return os.str();
}

void require_same_support(const Support& a, const Support& b, const char* op) {
    if (a != b) throw ContractError(std::string(op) + ": support mismatch " + join(a) + " vs " + join(b));
}

// Validates and renormalizes a weight vector whose mass is within kMassTolerance of 1.
std::vector<double> checked_weights(std::vector<double> w, bool allow_zero) {
    double total = 0.0;
    for (double& x : w) {
        if (!std::isfinite(x)) throw ContractError("probability weight is not finite");
        if (x < 0.0) {
            if (x < -kMassTolerance) throw ContractError("negative probability weight");
            x = 0.0;
        }
        if (!allow_zero && x == 0.0) throw ContractError("zero probability weight");
        total += x;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "probability weights sum to " << total << ", not 1";
        throw ContractError(os.str());
    }
    for (double& x : w) x /= total;
    return w;
}

} // namespace

void validate_support(const Support& support) {
    if (support.empty()) throw ContractError("empty support");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0) throw ContractError("negative atom in support");
        if (i > 0 && support[i] <= support[i - 1]) throw ContractError("support must be strictly increasing");
    }
}

Support support_union(const Support& a, const Support& b) {
    Support out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// ---------------------------------------------------------------- ProbVector

ProbVector::ProbVector(Support support, std::vector<double> weights)
    : support_(std::move(support)) {
    validate_support(support_);
    if (weights.size() != support_.size()) throw ContractError("weights and support differ in length");
    weights_ = checked_weights(std::move(weights), true);
}

ProbVector ProbVector::dirac(Support support, int atom) {
    std::vector<double> w(support.size(), 0.0);
    auto it = std::find(support.begin(), support.end(), atom);
    if (it == support.end()) throw ContractError("dirac atom not in support");
    w[static_cast<std::size_t>(it - support.begin())] = 1.0;
    return ProbVector(std::move(support), std::move(w));
}

ProbVector ProbVector::uniform(Support support) {
    std::vector<double> w(support.size(), 1.0 / static_cast<double>(support.size()));
    return ProbVector(std::move(support), std::move(w));
}

int ProbVector::index_of(int k) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), k);
    if (it == support_.end() || *it != k) return -1;
    return static_cast<int>(it - support_.begin());
}

double ProbVector::mass_at(int k) const {
    int i = index_of(k);
    return i < 0 ? 0.0 : weights_[static_cast<std::size_t>(i)];
}

bool ProbVector::strictly_positive() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double x) { return x > 0.0; });
}

std::string ProbVector::key(char sep) const {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (i) os << sep;
        os << weights_[i];
    }
    return os.str();
}

// -------------------------------------------------------------- OffspringLaw

OffspringLaw::OffspringLaw(Support support, std::vector<double> probs) {
    validate_support(support);
    if (probs.size() != support.size()) throw ContractError("probs and support differ in length");
    probs = checked_weights(std::move(probs), true);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            support_.push_back(support[i]);
            weights_.push_back(probs[i]);
        }
    }
}

double OffspringLaw::prob(int k) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), k);
    if (it == support_.end() || *it != k) return 0.0;
    return weights_[static_cast<std::size_t>(it - support_.begin())];
}

double OffspringLaw::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * weights_[i];
    return m;
}

bool OffspringLaw::positive_part_is_singleton() const {
    return std::count_if(support_.begin(), support_.end(), [](int k) { return k > 0; }) <= 1;
}

// ---------------------------------------------------------- EmpiricalMeasure

EmpiricalMeasure::EmpiricalMeasure(Support support, std::vector<std::int64_t> counts)
    : support_(std::move(support)), counts_(std::move(counts)) {
    validate_support(support_);
    if (counts_.size() != support_.size()) throw ContractError("counts and support differ in length");
    for (auto c : counts_) {
        if (c < 0) throw ContractError("negative count");
        total_ += c;
    }
    if (total_ <= 0) throw ContractError("empirical measure needs a positive total");
}

ProbVector EmpiricalMeasure::normalized() const {
    std::vector<double> w(counts_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return ProbVector(support_, std::move(w));
}

std::string EmpiricalMeasure::key(char sep) const {
    std::string out;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(counts_[i]);
    }
    return out;
}

// ---------------------------------------------------------------- LogWeights

LogWeights::LogWeights(Support support, std::vector<double> values)
    : support_(std::move(support)), values_(std::move(values)) {
    validate_support(support_);
    if (values_.size() != support_.size()) throw ContractError("log-weights and support differ in length");
    for (double v : values_) {
        if (std::isnan(v)) throw ContractError("NaN log-weight");
        if (v == kInf) throw ContractError("log-weight must be < +inf");
    }
}

LogWeights LogWeights::log_of_atoms(const Support& support) {
    std::vector<double> v(support.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = support[i] == 0 ? -kInf : std::log(static_cast<double>(support[i]));
    return LogWeights(support, std::move(v));
}

LogWeights LogWeights::zeros(const Support& support) {
    return LogWeights(support, std::vector<double>(support.size(), 0.0));
}

bool LogWeights::all_minus_infinity() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == -kInf; });
}

double LogWeights::max_entry() const {
    return *std::max_element(values_.begin(), values_.end());
}

LogWeights LogWeights::shifted(double c) const {
    if (!std::isfinite(c)) throw ContractError("shift must be finite");
    std::vector<double> v = values_;
    for (double& x : v) x += c;
    return LogWeights(support_, std::move(v));
}

// ---------------------------------------------------------------- operations

ProbVector align(const ProbVector& rho, const Support& target) {
    validate_support(target);
    std::vector<double> w(target.size(), 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        auto it = std::lower_bound(target.begin(), target.end(), rho.support()[i]);
        if (it == target.end() || *it != rho.support()[i]) {
            if (rho[i] > 0.0) throw ContractError("align: target support misses an atom carrying mass");
            continue;
        }
        w[static_cast<std::size_t>(it - target.begin())] = rho[i];
    }
    return ProbVector(target, std::move(w));
}

ExtendedReal relative_entropy(const ProbVector& rho, const ProbVector& nu) {
    require_same_support(rho.support(), nu.support(), "relative_entropy");
    double h = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] == 0.0) continue;
        if (nu[i] == 0.0) return ExtendedReal::plus_infinity();
        h += rho[i] * std::log(rho[i] / nu[i]);
    }
    // Rounding can push an exact zero slightly negative.
    return ExtendedReal(std::max(h, 0.0));
}

ExtendedReal relative_entropy(const ProbVector& rho, const OffspringLaw& nu) {
    return relative_entropy(rho, nu.as_prob_vector());
}

ExtendedReal pair(const ProbVector& rho, const LogWeights& lam) {
    require_same_support(rho.support(), lam.support(), "pair");
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] == 0.0) continue;
        if (lam[i] == -kInf) return ExtendedReal::minus_infinity();
        s += rho[i] * lam[i];
    }
    return ExtendedReal(s);
}

ProbVector size_bias(const OffspringLaw& nu) {
    double m = nu.mean();
    if (!(m > 0.0)) throw ContractError("size_bias: degenerate law with zero mean");
    std::vector<double> w(nu.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = nu.support()[i] * nu[i] / m;
    return ProbVector(nu.support(), std::move(w));
}

double mean(const ProbVector& rho) {
    double m = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) m += rho.support()[i] * rho[i];
    return m;
}

ProbVector mix(double q, const ProbVector& rho, const ProbVector& nu) {
    if (!(q >= 0.0 && q <= 1.0)) throw ContractError("mix: weight outside [0,1]");
    require_same_support(rho.support(), nu.support(), "mix");
    std::vector<double> w(rho.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = q * rho[i] + (1.0 - q) * nu[i];
    return ProbVector(rho.support(), std::move(w));
}

double linf_distance(const ProbVector& a, const ProbVector& b) {
    require_same_support(a.support(), b.support(), "linf_distance");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace rgw
