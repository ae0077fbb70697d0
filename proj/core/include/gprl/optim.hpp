#ifndef GPRL_OPTIM_HPP
#define GPRL_OPTIM_HPP

#include <map>
#include <string>
#include <vector>

#include "gprl/model.hpp"

namespace gprl::nn {

// AdamW: adaptive moments with decoupled weight decay.
class AdamW {
 public:
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // Applies one update from the gradients currently stored in the
  // parameter tensors. Does not clear gradients.
  void step(Parameters& params, double lr, double weight_decay);

  long step_count() const { return step_; }

  struct Slot {
    std::vector<double> m, v;
  };
  std::map<std::string, Slot>& state() { return state_; }
  const std::map<std::string, Slot>& state() const { return state_; }
  void set_step_count(long s) { step_ = s; }

 private:
  long step_ = 0;
  std::map<std::string, Slot> state_;
};

}  // namespace gprl::nn

#endif  // GPRL_OPTIM_HPP
