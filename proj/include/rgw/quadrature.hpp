#pragma once

#include <functional>
#include <vector>

namespace rgw::quad {

/// Nodes and weights of an interpolatory rule on [0, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule for the weight (1-u)^alpha on [0, 1], alpha > -1.
/// Built by Golub-Welsch; results are cached per thread.
const Rule& gauss_jacobi_unit(int n, double alpha);

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_subdivisions = 2000;
    /// Treat the (1-s)^alpha factor analytically with a Gauss-Jacobi panel at s = 1.
    /// When false the whole integrand goes through plain Gauss-Kronrod bisection.
    bool jacobi_endpoint = true;
    /// Width of the initial endpoint panel.
    double tail_fraction = 0.1;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
    bool converged = false;
};

/// One 21-point Gauss-Kronrod panel on [a, b] with the QUADPACK error estimate.
Result gauss_kronrod21(const std::function<double(double)>& f, double a, double b);

/// Integrates (1-s)^alpha * f(s) over [0, 1], where f is smooth on [0, 1] (possibly with
/// a nearby singularity just beyond s = 1). Adaptive Gauss-Kronrod panels cover the interior;
/// the endpoint panel uses Gauss-Jacobi with the exact algebraic weight and is halved
/// geometrically toward s = 1 whenever its two-order estimate disagrees.
Result integrate_endpoint_weighted(const std::function<double(double)>& f, double alpha, const Options& opt = {});

} // namespace rgw::quad
