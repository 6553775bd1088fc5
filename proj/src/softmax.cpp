#include "lrd/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrd {

void softmax_in_place(std::span<double> logits) {
  if (logits.empty()) return;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& x : logits) {
    x = std::exp(x - top);
    total += x;
  }
  const double inv = 1.0 / total;
  for (double& x : logits) x *= inv;
}

std::vector<double> softmax(std::span<const double> values, double beta) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [beta](double v) { return beta * v; });
  softmax_in_place(out);
  return out;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += std::exp(v - top);
  return top + std::log(total);
}

}  // namespace lrd
