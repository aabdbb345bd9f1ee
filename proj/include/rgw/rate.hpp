#pragma once

#include <vector>

#include "rgw/errors.hpp"
#include "rgw/extended_real.hpp"
#include "rgw/measures.hpp"

namespace rgw {

struct QuadratureSpec {
    double rel_tol = 1e-12;
    int max_subdivisions = 2000;
    /// Integrate the algebraic zero at the right endpoint with a Gauss-Jacobi panel.
    bool jacobi_endpoint = true;
    /// Exact polynomial expansion when every exponent nu(k)(1-q)/q is an integer.
    bool polynomial_fast_path = true;

    void validate() const;
};

/// Legendre dual at rho: value = Lambda_q*(rho), argdual normalized so that max = 0.
struct RateDual {
    double value = 0.0;
    LogWeights argdual{Support{0}, {0.0}};
    double residual = 0.0;
    int iterations = 0;
};

class DualSolverError : public NumericError {
  public:
    DualSolverError(const std::string& what, RateDual best)
        : NumericError(what, best.residual, best.iterations), best_(std::move(best)) {}
    const RateDual& best() const noexcept { return best_; }

  private:
    RateDual best_;
};

struct DualSolverOptions {
    double tolerance = 1e-9;
    int max_iterations = 200;
};

/// log sum nu(k) e^{lam(k)}; -inf for the all-(-inf) sentinel.
ExtendedReal lambda0(const LogWeights& lam, const OffspringLaw& nu);

/// Lambda_0* is the relative entropy H(rho | nu).
ExtendedReal lambda0_star(const ProbVector& rho, const OffspringLaw& nu);

/// log q - log int_0^inf prod_k (1 - t e^{lam(k)})_+^{nu(k)(1-q)/q} dt.
/// Returns -inf for the all-(-inf) sentinel.
double lambda_q(const LogWeights& lam, const OffspringLaw& nu, double q, const QuadratureSpec& spec = {});

ProbVector grad_lambda_q(const LogWeights& lam, const OffspringLaw& nu, double q, const QuadratureSpec& spec = {});

/// True when every exponent nu(k)(1-q)/q is an integer, so the integrand is a polynomial.
bool polynomial_route_available(const OffspringLaw& nu, double q);

/// Exact evaluation through polynomial expansion; requires polynomial_route_available.
double lambda_q_polynomial(const LogWeights& lam, const OffspringLaw& nu, double q);
ProbVector grad_lambda_q_polynomial(const LogWeights& lam, const OffspringLaw& nu, double q);

RateDual lambda_q_star(const ProbVector& rho, const OffspringLaw& nu, double q, const QuadratureSpec& spec = {},
                       const DualSolverOptions& opt = {});

/// Concentration target of the empirical offspring law along typical lines of descent.
ProbVector nu_bar_q(const OffspringLaw& nu, double q, const QuadratureSpec& spec = {});

/// Exponential growth rate of E_q Z_n.
double growth_exponent(const OffspringLaw& nu, double q, const QuadratureSpec& spec = {});

struct HalfspaceMinimum {
    ProbVector minimizer;
    double value = 0.0;
    int iterations = 0;
    double projected_gradient = 0.0;
};

/// argmin of Lambda_q* over {rho : <rho, w> >= c}.
HalfspaceMinimum argmin_rate_over_halfspace(const OffspringLaw& nu, double q, const RealVector& w, double c,
                                            const QuadratureSpec& spec = {});

} // namespace rgw
