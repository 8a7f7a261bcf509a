#include "dispersal/simplex.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dispersal {

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("cannot project an empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return normalize_probabilities(std::move(out));
}

std::vector<double> normalize_probabilities(std::vector<double> v,
                                            double floor) {
  double sum = 0.0;
  for (auto& x : v) {
    if (x < floor) x = 0.0;
    sum += x;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("no positive mass to normalize");
  for (auto& x : v) x = std::min(x / sum, 1.0);
  return v;
}

}  // namespace dispersal
