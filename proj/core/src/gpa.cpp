#include "gprl/gpa.hpp"

#include <cmath>

namespace gprl::gpa {

using nn::Node;
using nn::Tape;

std::vector<double> gaussian_prior(int center, int n, double coeff) {
  if (center < 1 || center > n)
    throw ContractViolation("gaussian_prior: center out of range");
  if (coeff <= 0.0) throw ContractViolation("gaussian_prior: coeff <= 0");
  // max-subtraction: the peak term is always exp(0)
  std::vector<double> p(n);
  double z = 0.0;
  for (int m = 1; m <= n; ++m) {
    const double d = double(m - center);
    p[m - 1] = std::exp(-coeff * d * d);
    z += p[m - 1];
  }
  for (double& x : p) x /= z;
  return p;
}

Node* gaussian_prior_node(Tape& tape, Node* coeff, int center, int n) {
  if (center < 1 || center > n)
    throw ContractViolation("gaussian_prior_node: center out of range");
  std::vector<double> dsq(n);
  for (int m = 1; m <= n; ++m)
    dsq[m - 1] = double(m - center) * double(m - center);
  Node* d2 = tape.constant(1, n, dsq);
  Node* logits = tape.smul(coeff, d2, -1.0);
  return tape.softmax_rows(logits);
}

std::optional<std::pair<int, int>> select_reference(
    std::span<const corpus::EntityTriplet> generated, Slot slot,
    std::optional<int> sampled_start) {
  if (slot == Slot::type)
    throw ContractViolation("select_reference: type slot has no prior");
  if (generated.empty()) return std::nullopt;
  if (slot == Slot::start) {
    const auto& e = generated.back();
    return std::make_pair(e.start, e.end);
  }
  if (!sampled_start)
    throw ContractViolation("select_reference: end slot needs sampled_start");
  const int s = *sampled_start;
  for (auto it = generated.rbegin(); it != generated.rend(); ++it) {
    const bool current_inner = it->start <= s && s <= it->end;
    const bool current_outer = s <= it->start;
    if (current_inner || current_outer)
      return std::make_pair(it->start, it->end);
  }
  return std::nullopt;
}

std::vector<double> mix_prior(const std::vector<double>& dist,
                              const std::vector<double>& prior,
                              const GpaConfig& config, int K, int n) {
  if (static_cast<int>(dist.size()) != 1 + K + n)
    throw ContractViolation("mix_prior: distribution length mismatch");
  if (static_cast<int>(prior.size()) != n)
    throw ContractViolation("mix_prior: prior length mismatch");
  config.validate();
  if (!config.enabled) return dist;
  double w = 0.0;
  for (int m = 0; m < n; ++m) w += dist[1 + K + m];
  if (w == 0.0) return dist;
  std::vector<double> out = dist;
  const double a = config.alpha;
  for (int m = 0; m < n; ++m)
    out[1 + K + m] = a * dist[1 + K + m] + (1.0 - a) * w * prior[m];
  return out;
}

Node* mix_prior_node(Tape& tape, Node* dist, Node* prior, double alpha, int K,
                     int n) {
  if (dist->rows != 1 || dist->cols != 1 + K + n)
    throw ContractViolation("mix_prior_node: distribution shape mismatch");
  if (prior->rows != 1 || prior->cols != n)
    throw ContractViolation("mix_prior_node: prior shape mismatch");
  Node* fixed = tape.slice_cols(dist, 0, 1 + K);
  Node* block = tape.slice_cols(dist, 1 + K, 1 + K + n);
  Node* w = tape.sum_all(block);
  Node* mixed = tape.add(tape.scale(block, alpha),
                         tape.smul(w, prior, 1.0 - alpha));
  return tape.hcat(fixed, mixed);
}

}  // namespace gprl::gpa
