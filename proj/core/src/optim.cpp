#include "gprl/optim.hpp"

#include <cmath>

namespace gprl::nn {

void AdamW::step(Parameters& params, double lr, double weight_decay) {
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1, double(step_));
  const double bc2 = 1.0 - std::pow(beta2, double(step_));
  params.for_each([&](const std::string& name, Tensor& t) {
    Slot& s = state_[name];
    if (s.m.empty()) {
      s.m.assign(t.size(), 0.0);
      s.v.assign(t.size(), 0.0);
    }
    if (s.m.size() != t.size())
      throw ValidationError("adamw: state shape mismatch for " + name);
    for (size_t i = 0; i < t.size(); ++i) {
      const double g = t.g[i];
      s.m[i] = beta1 * s.m[i] + (1.0 - beta1) * g;
      s.v[i] = beta2 * s.v[i] + (1.0 - beta2) * g * g;
      const double mhat = s.m[i] / bc1;
      const double vhat = s.v[i] / bc2;
      t.v[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + weight_decay * t.v[i]);
    }
  });
}

}  // namespace gprl::nn
