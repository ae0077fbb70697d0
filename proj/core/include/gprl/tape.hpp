#ifndef GPRL_TAPE_HPP
#define GPRL_TAPE_HPP

#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "gprl/tensor.hpp"

namespace gprl::nn {

// One value in the computation graph. Owned by a Tape; plain pointers are
// stable for the tape's lifetime.
struct Node {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;
  std::vector<double> g;
  std::function<void()> back;  // empty for leaves/constants

  size_t size() const { return v.size(); }
  double& at(int r, int c) { return v[size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[size_t(r) * cols + c]; }
};

// Reverse-mode tape. Nodes are recorded in creation order; backward walks
// the tape in reverse, so the graph must be built in topological order
// (which dynamic construction guarantees).
class Tape {
 public:
  Node* constant(int rows, int cols, std::span<const double> values);
  Node* constant_scalar(double value);
  // Leaf bound to parameter storage; backward accumulates into p.g.
  Node* param(Tensor& p);

  Node* matmul(Node* a, Node* b);     // (m,k)x(k,n)
  Node* matmul_nt(Node* a, Node* b);  // (m,k)x(n,k)^T -> (m,n)
  Node* add(Node* a, Node* b);        // same shape
  Node* add_rowvec(Node* a, Node* b); // (m,n) + broadcast (1,n)
  Node* mul(Node* a, Node* b);        // elementwise
  Node* scale(Node* a, double c);
  Node* axpby(double alpha, Node* a, double beta, Node* b);
  Node* relu(Node* a);
  Node* softplus(Node* a);
  Node* log(Node* a);
  // Per-row layer normalization with learnable gain/bias (1,n).
  Node* layernorm(Node* a, Node* gain, Node* bias, double eps = 1e-5);
  // Row-wise softmax. Optional additive mask (same shape); use -1e30 to
  // zero out an entry.
  Node* softmax_rows(Node* a, const std::vector<double>* mask = nullptr);
  Node* gather_rows(Node* a, std::vector<int> idx);
  Node* row(Node* a, int r);
  Node* vstack(const std::vector<Node*>& parts);  // same cols
  Node* slice_cols(Node* a, int c0, int c1);      // rows preserved
  Node* hcat(Node* a, Node* b);                   // single-row concat
  Node* sum_all(Node* a);                         // -> (1,1)
  Node* pick(Node* a, int r, int c);              // -> (1,1)
  // c * s * a with s a (1,1) scalar node broadcast over a.
  Node* smul(Node* s, Node* a, double c = 1.0);

  void backward(Node* root);  // root must be (1,1)

  size_t node_count() const { return order_.size(); }

 private:
  Node* fresh(int rows, int cols);
  std::deque<Node> nodes_;
  std::vector<Node*> order_;
};

}  // namespace gprl::nn

#endif  // GPRL_TAPE_HPP
