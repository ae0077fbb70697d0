#ifndef GPRL_TENSOR_HPP
#define GPRL_TENSOR_HPP

#include <cmath>
#include <vector>

#include "gprl/common.hpp"

namespace gprl::nn {

// Dense row-major matrix with a gradient buffer. Learnable parameters and
// constants both live in this type; the tape accumulates into g.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;
  std::vector<double> g;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(size_t(r) * c, 0.0), g(size_t(r) * c, 0.0) {}

  size_t size() const { return v.size(); }
  double& at(int r, int c) { return v[size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[size_t(r) * cols + c]; }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

}  // namespace gprl::nn

#endif  // GPRL_TENSOR_HPP
