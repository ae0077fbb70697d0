#include "gprl/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace gprl::nn {

Node* Tape::fresh(int rows, int cols) {
  nodes_.emplace_back();
  Node* n = &nodes_.back();
  n->rows = rows;
  n->cols = cols;
  n->v.assign(size_t(rows) * cols, 0.0);
  n->g.assign(size_t(rows) * cols, 0.0);
  order_.push_back(n);
  return n;
}

Node* Tape::constant(int rows, int cols, std::span<const double> values) {
  if (values.size() != size_t(rows) * cols)
    throw ContractViolation("tape: constant size mismatch");
  Node* n = fresh(rows, cols);
  std::copy(values.begin(), values.end(), n->v.begin());
  return n;
}

Node* Tape::constant_scalar(double value) {
  Node* n = fresh(1, 1);
  n->v[0] = value;
  return n;
}

Node* Tape::param(Tensor& p) {
  Node* n = fresh(p.rows, p.cols);
  n->v = p.v;
  Tensor* pp = &p;
  n->back = [n, pp]() {
    for (size_t i = 0; i < n->size(); ++i) pp->g[i] += n->g[i];
  };
  return n;
}

Node* Tape::matmul(Node* a, Node* b) {
  if (a->cols != b->rows) throw ContractViolation("matmul: shape mismatch");
  const int m = a->rows, k = a->cols, n = b->cols;
  Node* out = fresh(m, n);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double av = a->v[size_t(i) * k + p];
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j)
        out->v[size_t(i) * n + j] += av * b->v[size_t(p) * n + j];
    }
  out->back = [a, b, out, m, k, n]() {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const double go = out->g[size_t(i) * n + j];
        if (go == 0.0) continue;
        for (int p = 0; p < k; ++p) {
          a->g[size_t(i) * k + p] += go * b->v[size_t(p) * n + j];
          b->g[size_t(p) * n + j] += go * a->v[size_t(i) * k + p];
        }
      }
  };
  return out;
}

Node* Tape::matmul_nt(Node* a, Node* b) {
  if (a->cols != b->cols) throw ContractViolation("matmul_nt: shape mismatch");
  const int m = a->rows, k = a->cols, n = b->rows;
  Node* out = fresh(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p)
        s += a->v[size_t(i) * k + p] * b->v[size_t(j) * k + p];
      out->v[size_t(i) * n + j] = s;
    }
  out->back = [a, b, out, m, k, n]() {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const double go = out->g[size_t(i) * n + j];
        if (go == 0.0) continue;
        for (int p = 0; p < k; ++p) {
          a->g[size_t(i) * k + p] += go * b->v[size_t(j) * k + p];
          b->g[size_t(j) * k + p] += go * a->v[size_t(i) * k + p];
        }
      }
  };
  return out;
}

Node* Tape::add(Node* a, Node* b) {
  if (a->rows != b->rows || a->cols != b->cols)
    throw ContractViolation("add: shape mismatch");
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] + b->v[i];
  out->back = [a, b, out]() {
    for (size_t i = 0; i < out->size(); ++i) {
      a->g[i] += out->g[i];
      b->g[i] += out->g[i];
    }
  };
  return out;
}

Node* Tape::add_rowvec(Node* a, Node* b) {
  if (b->rows != 1 || a->cols != b->cols)
    throw ContractViolation("add_rowvec: shape mismatch");
  Node* out = fresh(a->rows, a->cols);
  for (int i = 0; i < a->rows; ++i)
    for (int j = 0; j < a->cols; ++j)
      out->at(i, j) = a->at(i, j) + b->v[j];
  out->back = [a, b, out]() {
    for (int i = 0; i < a->rows; ++i)
      for (int j = 0; j < a->cols; ++j) {
        a->g[size_t(i) * a->cols + j] += out->g[size_t(i) * a->cols + j];
        b->g[j] += out->g[size_t(i) * a->cols + j];
      }
  };
  return out;
}

Node* Tape::mul(Node* a, Node* b) {
  if (a->rows != b->rows || a->cols != b->cols)
    throw ContractViolation("mul: shape mismatch");
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] * b->v[i];
  out->back = [a, b, out]() {
    for (size_t i = 0; i < out->size(); ++i) {
      a->g[i] += out->g[i] * b->v[i];
      b->g[i] += out->g[i] * a->v[i];
    }
  };
  return out;
}

Node* Tape::scale(Node* a, double c) {
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i) out->v[i] = c * a->v[i];
  out->back = [a, out, c]() {
    for (size_t i = 0; i < out->size(); ++i) a->g[i] += c * out->g[i];
  };
  return out;
}

Node* Tape::axpby(double alpha, Node* a, double beta, Node* b) {
  if (a->rows != b->rows || a->cols != b->cols)
    throw ContractViolation("axpby: shape mismatch");
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i)
    out->v[i] = alpha * a->v[i] + beta * b->v[i];
  out->back = [a, b, out, alpha, beta]() {
    for (size_t i = 0; i < out->size(); ++i) {
      a->g[i] += alpha * out->g[i];
      b->g[i] += beta * out->g[i];
    }
  };
  return out;
}

Node* Tape::relu(Node* a) {
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i)
    out->v[i] = a->v[i] > 0.0 ? a->v[i] : 0.0;
  out->back = [a, out]() {
    for (size_t i = 0; i < out->size(); ++i)
      if (a->v[i] > 0.0) a->g[i] += out->g[i];
  };
  return out;
}

Node* Tape::softplus(Node* a) {
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i) {
    const double x = a->v[i];
    out->v[i] = x > 30.0 ? x : std::log1p(std::exp(x));
  }
  out->back = [a, out]() {
    for (size_t i = 0; i < out->size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-a->v[i]));
      a->g[i] += s * out->g[i];
    }
  };
  return out;
}

Node* Tape::log(Node* a) {
  Node* out = fresh(a->rows, a->cols);
  for (size_t i = 0; i < out->size(); ++i) out->v[i] = std::log(a->v[i]);
  out->back = [a, out]() {
    for (size_t i = 0; i < out->size(); ++i)
      a->g[i] += out->g[i] / a->v[i];
  };
  return out;
}

Node* Tape::layernorm(Node* a, Node* gain, Node* bias, double eps) {
  if (gain->rows != 1 || gain->cols != a->cols || bias->rows != 1 ||
      bias->cols != a->cols)
    throw ContractViolation("layernorm: shape mismatch");
  const int R = a->rows, C = a->cols;
  Node* out = fresh(R, C);
  auto mean = std::make_shared<std::vector<double>>(R);
  auto istd = std::make_shared<std::vector<double>>(R);
  for (int i = 0; i < R; ++i) {
    double m = 0.0;
    for (int j = 0; j < C; ++j) m += a->at(i, j);
    m /= C;
    double var = 0.0;
    for (int j = 0; j < C; ++j) {
      const double dlt = a->at(i, j) - m;
      var += dlt * dlt;
    }
    var /= C;
    const double is = 1.0 / std::sqrt(var + eps);
    (*mean)[i] = m;
    (*istd)[i] = is;
    for (int j = 0; j < C; ++j)
      out->at(i, j) = (a->at(i, j) - m) * is * gain->v[j] + bias->v[j];
  }
  out->back = [a, gain, bias, out, mean, istd, R, C]() {
    for (int i = 0; i < R; ++i) {
      const double m = (*mean)[i], is = (*istd)[i];
      // xhat_j = (x_j - m) * is
      double sum_gy = 0.0, sum_gy_xhat = 0.0;
      std::vector<double> gy(C), xhat(C);
      for (int j = 0; j < C; ++j) {
        xhat[j] = (a->at(i, j) - m) * is;
        gy[j] = out->g[size_t(i) * C + j] * gain->v[j];
        gain->g[j] += out->g[size_t(i) * C + j] * xhat[j];
        bias->g[j] += out->g[size_t(i) * C + j];
        sum_gy += gy[j];
        sum_gy_xhat += gy[j] * xhat[j];
      }
      for (int j = 0; j < C; ++j)
        a->g[size_t(i) * C + j] +=
            is * (gy[j] - sum_gy / C - xhat[j] * sum_gy_xhat / C);
    }
  };
  return out;
}

Node* Tape::softmax_rows(Node* a, const std::vector<double>* mask) {
  if (mask && mask->size() != a->size())
    throw ContractViolation("softmax_rows: mask size mismatch");
  const int R = a->rows, C = a->cols;
  Node* out = fresh(R, C);
  for (int i = 0; i < R; ++i) {
    double mx = -1e300;
    for (int j = 0; j < C; ++j) {
      double x = a->at(i, j) + (mask ? (*mask)[size_t(i) * C + j] : 0.0);
      mx = std::max(mx, x);
    }
    double z = 0.0;
    for (int j = 0; j < C; ++j) {
      double x = a->at(i, j) + (mask ? (*mask)[size_t(i) * C + j] : 0.0);
      const double e = std::exp(x - mx);
      out->at(i, j) = e;
      z += e;
    }
    for (int j = 0; j < C; ++j) out->at(i, j) /= z;
  }
  out->back = [a, out, R, C]() {
    for (int i = 0; i < R; ++i) {
      double dot = 0.0;
      for (int j = 0; j < C; ++j)
        dot += out->g[size_t(i) * C + j] * out->v[size_t(i) * C + j];
      for (int j = 0; j < C; ++j)
        a->g[size_t(i) * C + j] += out->v[size_t(i) * C + j] *
                                   (out->g[size_t(i) * C + j] - dot);
    }
  };
  return out;
}

Node* Tape::gather_rows(Node* a, std::vector<int> idx) {
  for (int r : idx)
    if (r < 0 || r >= a->rows)
      throw ContractViolation("gather_rows: index out of range");
  Node* out = fresh(static_cast<int>(idx.size()), a->cols);
  for (size_t i = 0; i < idx.size(); ++i)
    for (int j = 0; j < a->cols; ++j) out->at(int(i), j) = a->at(idx[i], j);
  auto ids = std::make_shared<std::vector<int>>(std::move(idx));
  out->back = [a, out, ids]() {
    for (size_t i = 0; i < ids->size(); ++i)
      for (int j = 0; j < a->cols; ++j)
        a->g[size_t((*ids)[i]) * a->cols + j] +=
            out->g[i * size_t(a->cols) + j];
  };
  return out;
}

Node* Tape::row(Node* a, int r) { return gather_rows(a, {r}); }

Node* Tape::vstack(const std::vector<Node*>& parts) {
  if (parts.empty()) throw ContractViolation("vstack: empty");
  const int C = parts[0]->cols;
  int R = 0;
  for (Node* p : parts) {
    if (p->cols != C) throw ContractViolation("vstack: column mismatch");
    R += p->rows;
  }
  Node* out = fresh(R, C);
  int r0 = 0;
  for (Node* p : parts) {
    std::copy(p->v.begin(), p->v.end(), out->v.begin() + size_t(r0) * C);
    r0 += p->rows;
  }
  auto ps = std::make_shared<std::vector<Node*>>(parts);
  out->back = [out, ps, C]() {
    int r = 0;
    for (Node* p : *ps) {
      for (size_t i = 0; i < p->size(); ++i)
        p->g[i] += out->g[size_t(r) * C + i];
      r += p->rows;
    }
  };
  return out;
}

Node* Tape::slice_cols(Node* a, int c0, int c1) {
  if (c0 < 0 || c1 > a->cols || c0 >= c1)
    throw ContractViolation("slice_cols: bad range");
  Node* out = fresh(a->rows, c1 - c0);
  for (int i = 0; i < a->rows; ++i)
    for (int j = c0; j < c1; ++j) out->at(i, j - c0) = a->at(i, j);
  out->back = [a, out, c0]() {
    for (int i = 0; i < a->rows; ++i)
      for (int j = 0; j < out->cols; ++j)
        a->g[size_t(i) * a->cols + c0 + j] +=
            out->g[size_t(i) * out->cols + j];
  };
  return out;
}

Node* Tape::hcat(Node* a, Node* b) {
  if (a->rows != 1 || b->rows != 1)
    throw ContractViolation("hcat: expects single-row nodes");
  Node* out = fresh(1, a->cols + b->cols);
  std::copy(a->v.begin(), a->v.end(), out->v.begin());
  std::copy(b->v.begin(), b->v.end(), out->v.begin() + a->cols);
  out->back = [a, b, out]() {
    for (int j = 0; j < a->cols; ++j) a->g[j] += out->g[j];
    for (int j = 0; j < b->cols; ++j) b->g[j] += out->g[a->cols + j];
  };
  return out;
}

Node* Tape::sum_all(Node* a) {
  Node* out = fresh(1, 1);
  double s = 0.0;
  for (double x : a->v) s += x;
  out->v[0] = s;
  out->back = [a, out]() {
    for (size_t i = 0; i < a->size(); ++i) a->g[i] += out->g[0];
  };
  return out;
}

Node* Tape::pick(Node* a, int r, int c) {
  if (r < 0 || r >= a->rows || c < 0 || c >= a->cols)
    throw ContractViolation("pick: index out of range");
  Node* out = fresh(1, 1);
  out->v[0] = a->at(r, c);
  out->back = [a, out, r, c]() { a->g[size_t(r) * a->cols + c] += out->g[0]; };
  return out;
}

Node* Tape::smul(Node* s, Node* a, double c) {
  if (s->rows != 1 || s->cols != 1)
    throw ContractViolation("smul: scalar must be (1,1)");
  Node* out = fresh(a->rows, a->cols);
  const double sv = s->v[0];
  for (size_t i = 0; i < a->size(); ++i) out->v[i] = c * sv * a->v[i];
  out->back = [s, a, out, c]() {
    double acc = 0.0;
    for (size_t i = 0; i < a->size(); ++i) {
      acc += out->g[i] * a->v[i];
      a->g[i] += c * s->v[0] * out->g[i];
    }
    s->g[0] += c * acc;
  };
  return out;
}

void Tape::backward(Node* root) {
  if (root->rows != 1 || root->cols != 1)
    throw ContractViolation("backward: root must be scalar");
  root->g[0] = 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it)
    if ((*it)->back) (*it)->back();
}

}  // namespace gprl::nn
