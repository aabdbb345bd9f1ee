#pragma once

#include <stdexcept>
#include <string>

namespace rgw {

/// Bad input: precondition or contract violated by the caller.
class ContractError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The constraint set of an optimization problem is empty.
class InfeasibleError : public ContractError {
  public:
    using ContractError::ContractError;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& what, double achieved = 0.0, int iterations = 0)
        : std::runtime_error(what), achieved_(achieved), iterations_(iterations) {}

    double achieved() const noexcept { return achieved_; }
    int iterations() const noexcept { return iterations_; }

  private:
    double achieved_;
    int iterations_;
};

/// A Monte Carlo estimator produced no usable samples.
class StatisticalError : public NumericError {
  public:
    using NumericError::NumericError;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

} // namespace rgw
