#pragma once

#include <span>
#include <vector>

namespace dispersal {

/// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_to_simplex(std::span<const double> v);

/// Rescales non-negative weights to sum to one and zeroes entries below
/// `floor`. Throws if nothing positive remains.
std::vector<double> normalize_probabilities(std::vector<double> v,
                                            double floor = 0.0);

}  // namespace dispersal
