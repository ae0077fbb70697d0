#ifndef GPRL_GPA_HPP
#define GPRL_GPA_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gprl/corpus.hpp"
#include "gprl/tape.hpp"

namespace gprl::gpa {

enum class Slot { start, end, type };

struct GpaConfig {
  double alpha = 0.8;  // mixing weight, [0,1]; the prior gets 1-alpha
  bool enabled = true;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0)
      throw ValidationError("gpa: alpha must be in [0,1]");
  }
};

// Normalized discrete Gaussian over token positions 1..n centered at
// `center` (1-based). probs[m-1] ~ exp(-coeff * (m-center)^2).
std::vector<double> gaussian_prior(int center, int n, double coeff);

// Differentiable version; coeff is a (1,1) node (softplus'd lambda or mu).
nn::Node* gaussian_prior_node(nn::Tape& tape, nn::Node* coeff, int center,
                              int n);

// Picks the reference entity whose boundary shapes the prior.
// start slot: most recently generated entity, if any.
// end slot: most recent entity i with s_i <= sampled_start <= e_i or
// sampled_start <= s_i. sampled_start is a 0-based token position.
std::optional<std::pair<int, int>> select_reference(
    std::span<const corpus::EntityTriplet> generated, Slot slot,
    std::optional<int> sampled_start);

// Reshapes the pointer block of a full output distribution while keeping
// its total mass and the EOS/type entries: block' = alpha*block +
// (1-alpha)*w*prior, with w the block's mass. Returns dist unchanged when
// disabled or when the block carries no mass.
std::vector<double> mix_prior(const std::vector<double>& dist,
                              const std::vector<double>& prior,
                              const GpaConfig& config, int K, int n);

// Same computation on the tape. dist is (1, 1+K+n), prior is (1, n).
nn::Node* mix_prior_node(nn::Tape& tape, nn::Node* dist, nn::Node* prior,
                         double alpha, int K, int n);

}  // namespace gprl::gpa

#endif  // GPRL_GPA_HPP
