#pragma once

#include <vector>

namespace rgw {

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(const std::vector<double>& y);

/// Euclidean projection onto {x in simplex : <x,w> >= c}. Requires max(w) >= c.
std::vector<double> project_to_simplex_halfspace(const std::vector<double>& y, const std::vector<double>& w, double c);

} // namespace rgw
