#pragma once

#include <cstdint>
#include <vector>

#include "rgw/extended_real.hpp"
#include "rgw/measures.hpp"

namespace rgw {

/// Piecewise-constant control: eta_i is the value on ((i-1)/m, i/m].
class ControlPath {
  public:
    explicit ControlPath(std::vector<ProbVector> controls);
    static ControlPath constant(const ProbVector& rho, int steps);

    int steps() const noexcept { return static_cast<int>(controls_.size()); }
    const std::vector<ProbVector>& controls() const noexcept { return controls_; }
    const Support& support() const { return controls_.front().support(); }

    /// Running average at the midpoint of step i (1-based): (sum_{j<i} eta_j + eta_i/2) / (i - 1/2).
    ProbVector psi_mid(int i) const;
    /// (1/m) sum_i eta_i.
    ProbVector mean() const;

  private:
    std::vector<ProbVector> controls_;
};

/// (1/m) sum_i H(eta_i | q psi_{i-1/2} + (1-q) nu).
ExtendedReal control_objective(const ControlPath& path, const OffspringLaw& nu, double q);

struct ControlOptions {
    int restarts = 8;
    std::uint64_t seed = 42;
    double dirichlet_mix = 0.3;
    int max_inner_iterations = 4000;
};

struct ControlResult {
    double value = 0.0;
    ControlPath best_path;
    std::vector<double> restart_values;
    double constraint_residual = 0.0;
    int best_restart = 0;
};

/// Approximate infimum of control_objective over paths with (1/m) sum eta_i = rho.
ControlResult solve_control(const ProbVector& rho, const OffspringLaw& nu, double q, int m, const ControlOptions& opt = {});

double rate_by_control(const ProbVector& rho, const OffspringLaw& nu, double q, int m, int restarts = 8,
                       std::uint64_t seed = 42);

/// Two-phase control rho_eps on [0,1/2], rho_{-eps} on (1/2,1], rho_{+-eps} = rho +- eps (rho - nu),
/// evaluated with m = 1024 steps.
double two_phase_probe(const ProbVector& rho, const OffspringLaw& nu, double q, double eps);

} // namespace rgw
