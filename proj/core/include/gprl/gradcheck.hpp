#ifndef GPRL_GRADCHECK_HPP
#define GPRL_GRADCHECK_HPP

#include "gprl/train.hpp"

namespace gprl::nn {

struct FdEntry {
  std::string name;
  size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct FdReport {
  double max_relative_error = 0.0;
  bool pass = false;
  FdEntry worst;
  int checked = 0;
};

// Compares analytic gradients of the teacher-forced training loss against
// central finite differences on a random subsample of scalar parameters.
// Every parameter tensor contributes at least one coordinate, so the
// encoder, decoder, pointer head and lambda/mu paths are all covered.
FdReport finite_diff_check(Parameters& params,
                           const std::vector<int>& token_ids,
                           const std::vector<int>& target,
                           const gpa::GpaConfig& gpa_cfg, double epsilon,
                           double tolerance, int min_samples = 50,
                           std::uint64_t seed = 0);

}  // namespace gprl::nn

#endif  // GPRL_GRADCHECK_HPP
