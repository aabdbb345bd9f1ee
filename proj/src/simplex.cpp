#include "rgw/simplex.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "rgw/errors.hpp"

namespace rgw {

std::vector<double> project_to_simplex(const std::vector<double>& y) {
    require(!y.empty(), "cannot project an empty vector");
    std::vector<double> u = y;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::max(y[i] - theta, 0.0);
    return x;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> shifted(const std::vector<double>& y, const std::vector<double>& w, double t) {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] + t * w[i];
    return project_to_simplex(z);
}

} // namespace

std::vector<double> project_to_simplex_halfspace(const std::vector<double>& y, const std::vector<double>& w, double c) {
    require(y.size() == w.size(), "projection: dimension mismatch");
    if (*std::max_element(w.begin(), w.end()) < c) throw InfeasibleError("half-space misses the simplex");
    std::vector<double> x = project_to_simplex(y);
    if (dot(x, w) >= c) return x;
    // KKT: the projection is proj_simplex(y + t w) for the multiplier t >= 0 making the constraint tight.
    double hi = 1.0;
    for (int i = 0; i < 200 && dot(shifted(y, w, hi), w) < c; ++i) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dot(shifted(y, w, mid), w) < c) lo = mid;
        else hi = mid;
    }
    return shifted(y, w, hi);
}

} // namespace rgw
