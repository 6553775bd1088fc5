#ifndef LRD_SOFTMAX_HPP
#define LRD_SOFTMAX_HPP

#include <span>
#include <vector>

namespace lrd {

// Replaces logits with exp(logits - max) / sum in place. An empty span is a no-op.
// Never overflows: the largest term is exp(0) = 1.
void softmax_in_place(std::span<double> logits);

// softmax(beta * values)
std::vector<double> softmax(std::span<const double> values, double beta);

// log(sum(exp(values))), max-shifted.
double log_sum_exp(std::span<const double> values);

}  // namespace lrd

#endif  // LRD_SOFTMAX_HPP
