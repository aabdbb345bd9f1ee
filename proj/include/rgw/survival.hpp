#pragma once

#include <string>

#include "rgw/extended_real.hpp"
#include "rgw/measures.hpp"

namespace rgw {

/// Principal branch of the Lambert W function on [-1/e, inf).
double lambert_w0(double x);

/// J(a) = sum nu(k) (1-q) a(k) / (1 - q a(k)) log(a(k)/k); +inf when a(0) > 0.
ExtendedReal J_functional(const RealVector& a, const OffspringLaw& nu, double q);

/// g(a) = sum nu(k) / (1 - q a(k)); admissible a satisfy g(a) = 1/(1-q).
double survival_constraint(const RealVector& a, const OffspringLaw& nu, double q);

/// Ratio (dJ/da_k) / (dg/da_k) for every atom k >= 1 (NaN-free only where a(k) > 0).
RealVector lagrange_ratios(const RealVector& a, const OffspringLaw& nu, double q);

struct SurvivalReport {
    double C = 0.0;
    RealVector a_opt;
    double J_min = 0.0;
    /// Strict criterion J_min < 0.
    bool survives_certified = false;
    /// 0 is not an atom of nu, so no individual is ever childless.
    bool trivially_survives = false;
    std::string reason;
    double constraint_residual = 0.0;
    double baseline_c = 0.0;
    double J_baseline = 0.0;
};

struct ProportionalBaseline {
    double c = 0.0;
    double J_b = 0.0;
    double residual = 0.0;
};

/// Admissible b(k) = c k and its J value.
ProportionalBaseline proportional_baseline(const OffspringLaw& nu, double q);

/// Minimizer a(j) = -W0(-C j)/q of J over the admissible set, C fixed by the constraint.
SurvivalReport solve_survival_minimizer(const OffspringLaw& nu, double q);

} // namespace rgw
