#pragma once

#include <optional>
#include <string>

#include "rgw/measures.hpp"
#include "rgw/rate.hpp"

namespace rgw {

/// Margins within this band of zero give an Indeterminate verdict.
inline constexpr double kDecisionTolerance = 1e-6;

enum class VerdictKind { Evanescent, StronglyPersistentPositiveProb, NotStronglyPersistent, Indeterminate };

std::string to_string(VerdictKind kind);

struct Verdict {
    VerdictKind kind = VerdictKind::Indeterminate;
    /// Lambda_q*(rho) - <rho, ln>; Lambda_0* = H(rho|nu) when q = 0.
    double margin_evanescence = 0.0;
    /// <rho, ln> - H(rho | q rho + (1-q) nu).
    double margin_persistence = 0.0;
    /// q m_rho + (1-q) m_nu < 1.
    bool subcritical_flag = false;
};

/// Plain Galton-Watson classification. rho may live on a larger support than nu.
Verdict classify_gw(const ProbVector& rho, const OffspringLaw& nu);

Verdict classify_rgw(const ProbVector& rho, const OffspringLaw& nu, double q, const QuadratureSpec& spec = {});

/// Smallest q* such that every q > q* certifies strong persistence through the bound
/// <rho, ln> > (1-q) H(rho|nu). Empty when H(rho|nu) is infinite.
std::optional<double> min_memory_for_persistence(const ProbVector& rho, const OffspringLaw& nu);

/// a(k) = rho(k) / (q rho(k) + (1-q) nu(k)), a(0) = 0. Checks admissibility and pi_a = rho.
RealVector a_from_rho(const ProbVector& rho, const OffspringLaw& nu, double q);

struct PersistenceTarget {
    ProbVector pi;
    /// sum pi_a(k) log(a(k)/k); negative values certify persistence of pi_a.
    double criterion = 0.0;
};

PersistenceTarget pi_from_a(const RealVector& a, const OffspringLaw& nu, double q);

struct WeakPersistence {
    bool certified = false;
    /// s = 1: only the single-type inequality is relevant.
    bool strong_branch = false;
    double margin_first = 0.0;  // <tau mu, ln> - H(tau mu | nu)
    double margin_second = 0.0; // mixed inequality
};

/// Support of the two-type benchmark: (S + 1) united with S'.
Support two_type_support(const OffspringLaw& nu, const OffspringLaw& nu_prime);

/// Tests rho = s mu + (1-s) mu' against both inequalities of the two-type criterion.
/// mu lives on type-1 degrees (shifted by +1); tau shifts it back down.
WeakPersistence two_type_weak_persistence(const ProbVector& rho, const OffspringLaw& nu, const OffspringLaw& nu_prime,
                                          double s, const ProbVector& mu, const ProbVector& mu_prime);

struct WeakPersistenceSearch {
    bool found = false;
    double s = 0.0;
    std::optional<ProbVector> mu;
    std::optional<ProbVector> mu_prime;
    WeakPersistence result;
};

/// Scans s on a grid of the given mesh and mu on the simplex lattice over the type-1 atoms;
/// mu' is then forced by the decomposition. Returns the decomposition with the largest
/// smaller margin.
WeakPersistenceSearch two_type_grid_search(const ProbVector& rho, const OffspringLaw& nu, const OffspringLaw& nu_prime,
                                           int mesh);

} // namespace rgw
