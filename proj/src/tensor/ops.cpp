// Copyright 2026 The mdplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tensor/tensor.hpp"

namespace mdplan::tensor {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using ArrMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrMap = Eigen::Map<const Eigen::ArrayXd>;

ConstMatMap cmat(const Buffer& v, std::size_t r, std::size_t c) {
  return ConstMatMap(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}
MatMap mmat(Buffer& v, std::size_t r, std::size_t c) {
  return MatMap(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}
ConstArrMap carr(const Buffer& v) {
  return ConstArrMap(v.data(), static_cast<Eigen::Index>(v.size()));
}
ArrMap marr(Buffer& v) {
  return ArrMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

using Backward = std::function<void(Node&)>;

Tensor make_result(Shape shape, Buffer value, std::vector<Tensor> inputs,
                   Backward fn) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& t : inputs) needs = needs || t.requires_grad();
  }
  if (needs) {
    n->requires_grad = true;
    n->inputs.reserve(inputs.size());
    for (const auto& t : inputs) n->inputs.push_back(t.shared_node());
    n->backward_fn = std::move(fn);
  }
  return Tensor(std::move(n));
}

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw EngineError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw EngineError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                      shape_string(b.shape()));
  }
}

// Applies an elementwise map and its derivative (as a function of input and
// output) to a single tensor.
template <typename F, typename DF>
Tensor unary(const Tensor& a, F f, DF df) {
  Buffer out(a.numel());
  const auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(a.shape(), std::move(out), {a}, [df](Node& self) {
    Node& x = *self.inputs[0];
    if (!x.requires_grad) return;
    auto& gx = x.grad_buffer();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i] * df(x.value[i], self.value[i]);
  });
}

void softmax_row(const double* x, double* y, std::size_t n) {
  double mx = x[0];
  for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = std::exp(x[j] - mx);
    s += y[j];
  }
  const double inv = 1.0 / s;
  for (std::size_t j = 0; j < n; ++j) y[j] *= inv;
}

double log_sum_exp(const double* x, std::size_t n) {
  double mx = x[0];
  for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += std::exp(x[j] - mx);
  return mx + std::log(s);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw EngineError("matmul: shape mismatch " + shape_string(a.shape()) + " x " +
                      shape_string(b.shape()));
  }
  Buffer out(m * n);
  mmat(out, m, n).noalias() = cmat(a.node()->value, m, k) * cmat(b.node()->value, k, n);
  return make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    const auto g = cmat(self.grad, m, n);
    if (x.requires_grad) {
      mmat(x.grad_buffer(), m, k).noalias() += g * cmat(y.value, k, n).transpose();
    }
    if (y.requires_grad) {
      mmat(y.grad_buffer(), k, n).noalias() += cmat(x.value, m, k).transpose() * g;
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  Buffer out(m * n);
  mmat(out, n, m) = cmat(a.node()->value, m, n).transpose();
  return make_result({n, m}, std::move(out), {a}, [m, n](Node& self) {
    Node& x = *self.inputs[0];
    if (x.requires_grad) mmat(x.grad_buffer(), m, n) += cmat(self.grad, n, m).transpose();
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value) + carr(b.node()->value);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (in->requires_grad) marr(in->grad_buffer()) += carr(self.grad);
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value) - carr(b.node()->value);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (self.inputs[0]->requires_grad) marr(self.inputs[0]->grad_buffer()) += carr(self.grad);
    if (self.inputs[1]->requires_grad) marr(self.inputs[1]->grad_buffer()) -= carr(self.grad);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value) * carr(b.node()->value);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (x.requires_grad) marr(x.grad_buffer()) += carr(self.grad) * carr(y.value);
    if (y.requires_grad) marr(y.grad_buffer()) += carr(self.grad) * carr(x.value);
  });
}

Tensor add_bias(const Tensor& a, const Tensor& bias) {
  require_rank2(a, "add_bias");
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.numel() != n) {
    throw EngineError("add_bias: shape mismatch " + shape_string(a.shape()) + " + " +
                      shape_string(bias.shape()));
  }
  Buffer out(m * n);
  const auto bv = ConstMatMap(bias.node()->value.data(), 1, static_cast<Eigen::Index>(n));
  mmat(out, m, n) = cmat(a.node()->value, m, n).rowwise() + bv.row(0);
  return make_result({m, n}, std::move(out), {a, bias}, [m, n](Node& self) {
    Node& x = *self.inputs[0];
    Node& b = *self.inputs[1];
    if (x.requires_grad) marr(x.grad_buffer()) += carr(self.grad);
    if (b.requires_grad) {
      MatMap(b.grad_buffer().data(), 1, static_cast<Eigen::Index>(n)) +=
          cmat(self.grad, m, n).colwise().sum();
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value) * factor;
  return make_result(a.shape(), std::move(out), {a}, [factor](Node& self) {
    Node& x = *self.inputs[0];
    if (x.requires_grad) marr(x.grad_buffer()) += carr(self.grad) * factor;
  });
}

Tensor add_scalar(const Tensor& a, double value) {
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value) + value;
  return make_result(a.shape(), std::move(out), {a}, [](Node& self) {
    Node& x = *self.inputs[0];
    if (x.requires_grad) marr(x.grad_buffer()) += carr(self.grad);
  });
}

Tensor gelu(const Tensor& a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      a, [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [inv_sqrt_2pi](double x, double) {
        return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
      });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw EngineError("clamp: lo > hi");
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "minimum");
  Buffer out(a.numel());
  marr(out) = carr(a.node()->value).min(carr(b.node()->value));
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    // Ties route the gradient to the first operand.
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.value[i] <= y.value[i]) {
        if (x.requires_grad) x.grad_buffer()[i] += self.grad[i];
      } else if (y.requires_grad) {
        y.grad_buffer()[i] += self.grad[i];
      }
    }
  });
}

Tensor sum(const Tensor& a) {
  return make_result({}, {carr(a.node()->value).sum()}, {a}, [](Node& self) {
    Node& x = *self.inputs[0];
    if (x.requires_grad) marr(x.grad_buffer()) += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw EngineError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  require_rank2(x, "layer_norm");
  const std::size_t m = x.rows(), n = x.cols();
  if (gamma.numel() != n || beta.numel() != n) {
    throw EngineError("layer_norm: shape mismatch " + shape_string(x.shape()) + " with gamma " +
                      shape_string(gamma.shape()) + " / beta " + shape_string(beta.shape()));
  }
  Buffer out(m * n);
  Buffer xhat(m * n);
  Buffer inv_std(m);
  const auto& xv = x.node()->value;
  const auto& gv = gamma.node()->value;
  const auto& bv = beta.node()->value;
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = xv.data() + r * n;
    double mu = 0.0;
    for (std::size_t c = 0; c < n; ++c) mu += row[c];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::size_t c = 0; c < n; ++c) {
      const double h = (row[c] - mu) * is;
      xhat[r * n + c] = h;
      out[r * n + c] = gv[c] * h + bv[c];
    }
  }
  return make_result(
      {m, n}, std::move(out), {x, gamma, beta},
      [m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        Node& xn = *self.inputs[0];
        Node& gn = *self.inputs[1];
        Node& bn = *self.inputs[2];
        const auto& g = self.grad;
        if (gn.requires_grad || bn.requires_grad) {
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
              if (gn.requires_grad) gn.grad_buffer()[c] += g[r * n + c] * xhat[r * n + c];
              if (bn.requires_grad) bn.grad_buffer()[c] += g[r * n + c];
            }
          }
        }
        if (!xn.requires_grad) return;
        auto& gx = xn.grad_buffer();
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t r = 0; r < m; ++r) {
          double mean_d = 0.0, mean_dh = 0.0;
          for (std::size_t c = 0; c < n; ++c) {
            const double d = g[r * n + c] * gn.value[c];
            mean_d += d;
            mean_dh += d * xhat[r * n + c];
          }
          mean_d *= inv_n;
          mean_dh *= inv_n;
          for (std::size_t c = 0; c < n; ++c) {
            const double d = g[r * n + c] * gn.value[c];
            gx[r * n + c] += inv_std[r] * (d - mean_d - xhat[r * n + c] * mean_dh);
          }
        }
      });
}

Tensor softmax_rows(const Tensor& x) {
  require_rank2(x, "softmax_rows");
  const std::size_t m = x.rows(), n = x.cols();
  Buffer out(m * n);
  for (std::size_t r = 0; r < m; ++r) softmax_row(x.data().data() + r * n, out.data() + r * n, n);
  return make_result({m, n}, std::move(out), {x}, [m, n](Node& self) {
    Node& xn = *self.inputs[0];
    if (!xn.requires_grad) return;
    auto& gx = xn.grad_buffer();
    for (std::size_t r = 0; r < m; ++r) {
      const double* y = self.value.data() + r * n;
      const double* g = self.grad.data() + r * n;
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += g[c] * y[c];
      for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += y[c] * (g[c] - dot);
    }
  });
}

Tensor log_softmax_rows(const Tensor& x) {
  require_rank2(x, "log_softmax_rows");
  const std::size_t m = x.rows(), n = x.cols();
  Buffer out(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = x.data().data() + r * n;
    const double lse = log_sum_exp(row, n);
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = row[c] - lse;
  }
  return make_result({m, n}, std::move(out), {x}, [m, n](Node& self) {
    Node& xn = *self.inputs[0];
    if (!xn.requires_grad) return;
    auto& gx = xn.grad_buffer();
    for (std::size_t r = 0; r < m; ++r) {
      const double* y = self.value.data() + r * n;
      const double* g = self.grad.data() + r * n;
      double gs = 0.0;
      for (std::size_t c = 0; c < n; ++c) gs += g[c];
      for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += g[c] - std::exp(y[c]) * gs;
    }
  });
}

Tensor index_select_rows(const Tensor& x, std::span<const std::size_t> rows) {
  require_rank2(x, "index_select_rows");
  const std::size_t m = x.rows(), n = x.cols();
  Buffer out(rows.size() * n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m) {
      throw EngineError("index_select_rows: row " + std::to_string(rows[i]) +
                        " out of range for shape " + shape_string(x.shape()));
    }
    std::copy_n(x.data().data() + rows[i] * n, n, out.data() + i * n);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return make_result({rows.size(), n}, std::move(out), {x}, [n, idx = std::move(idx)](Node& self) {
    Node& xn = *self.inputs[0];
    if (!xn.requires_grad) return;
    auto& gx = xn.grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t c = 0; c < n; ++c) gx[idx[i] * n + c] += self.grad[i * n + c];
    }
  });
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::int32_t> ids) {
  require_rank2(table, "embedding_lookup");
  std::vector<std::size_t> rows(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= table.rows()) {
      throw EngineError("embedding_lookup: id " + std::to_string(ids[i]) +
                        " out of range for table " + shape_string(table.shape()));
    }
    rows[i] = static_cast<std::size_t>(ids[i]);
  }
  return index_select_rows(table, rows);
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw EngineError("concat_rows: no inputs");
  const std::size_t n = parts[0].cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_rank2(p, "concat_rows");
    if (p.cols() != n) {
      throw EngineError("concat_rows: shape mismatch " + shape_string(parts[0].shape()) + " vs " +
                        shape_string(p.shape()));
    }
    total += p.rows();
  }
  Buffer out;
  out.reserve(total * n);
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    offsets.push_back(out.size());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_result({total, n}, std::move(out), std::move(inputs),
                     [offsets = std::move(offsets)](Node& self) {
                       for (std::size_t i = 0; i < self.inputs.size(); ++i) {
                         Node& in = *self.inputs[i];
                         if (!in.requires_grad) continue;
                         auto& g = in.grad_buffer();
                         for (std::size_t j = 0; j < g.size(); ++j) g[j] += self.grad[offsets[i] + j];
                       }
                     });
}

Tensor gather_cols(const Tensor& x, std::span<const std::int32_t> cols) {
  require_rank2(x, "gather_cols");
  const std::size_t m = x.rows(), n = x.cols();
  if (cols.size() != m) {
    throw EngineError("gather_cols: " + std::to_string(cols.size()) + " indices for shape " +
                      shape_string(x.shape()));
  }
  Buffer out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (cols[i] < 0 || static_cast<std::size_t>(cols[i]) >= n) {
      throw EngineError("gather_cols: column " + std::to_string(cols[i]) + " out of range");
    }
    out[i] = x.data()[i * n + static_cast<std::size_t>(cols[i])];
  }
  std::vector<std::int32_t> idx(cols.begin(), cols.end());
  return make_result({m}, std::move(out), {x}, [n, idx = std::move(idx)](Node& self) {
    Node& xn = *self.inputs[0];
    if (!xn.requires_grad) return;
    auto& gx = xn.grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) gx[i * n + static_cast<std::size_t>(idx[i])] += self.grad[i];
  });
}

Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, int n_heads) {
  require_rank2(q, "multi_head_attention");
  require_same_shape(q, k, "multi_head_attention");
  require_same_shape(q, v, "multi_head_attention");
  const std::size_t len = q.rows(), d = q.cols();
  if (n_heads <= 0 || d % static_cast<std::size_t>(n_heads) != 0) {
    throw EngineError("multi_head_attention: width " + std::to_string(d) +
                      " not divisible by heads " + std::to_string(n_heads));
  }
  const auto L = static_cast<Eigen::Index>(len);
  const auto dh = static_cast<Eigen::Index>(d / static_cast<std::size_t>(n_heads));
  const double sc = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto Q = cmat(q.node()->value, len, d);
  const auto K = cmat(k.node()->value, len, d);
  const auto V = cmat(v.node()->value, len, d);
  Buffer out(len * d);
  auto O = mmat(out, len, d);
  std::vector<RowMat> probs(static_cast<std::size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    RowMat s = (Q.middleCols(h * dh, dh) * K.middleCols(h * dh, dh).transpose()) * sc;
    for (Eigen::Index r = 0; r < L; ++r) softmax_row(s.row(r).data(), s.row(r).data(), len);
    O.middleCols(h * dh, dh).noalias() = s * V.middleCols(h * dh, dh);
    probs[static_cast<std::size_t>(h)] = std::move(s);
  }
  return make_result(
      {len, d}, std::move(out), {q, k, v},
      [len, d, dh, sc, n_heads, probs = std::move(probs)](Node& self) {
        Node& qn = *self.inputs[0];
        Node& kn = *self.inputs[1];
        Node& vn = *self.inputs[2];
        const auto G = cmat(self.grad, len, d);
        const auto Qm = cmat(qn.value, len, d);
        const auto Km = cmat(kn.value, len, d);
        const auto Vm = cmat(vn.value, len, d);
        for (int h = 0; h < n_heads; ++h) {
          const RowMat& P = probs[static_cast<std::size_t>(h)];
          const auto Gh = G.middleCols(h * dh, dh);
          if (vn.requires_grad) {
            mmat(vn.grad_buffer(), len, d).middleCols(h * dh, dh).noalias() += P.transpose() * Gh;
          }
          if (!qn.requires_grad && !kn.requires_grad) continue;
          RowMat dP = Gh * Vm.middleCols(h * dh, dh).transpose();
          const Eigen::VectorXd rowdot = (dP.array() * P.array()).rowwise().sum();
          RowMat dS = (P.array() * (dP.array().colwise() - rowdot.array())).matrix() * sc;
          if (qn.requires_grad) {
            mmat(qn.grad_buffer(), len, d).middleCols(h * dh, dh).noalias() +=
                dS * Km.middleCols(h * dh, dh);
          }
          if (kn.requires_grad) {
            mmat(kn.grad_buffer(), len, d).middleCols(h * dh, dh).noalias() +=
                dS.transpose() * Qm.middleCols(h * dh, dh);
          }
        }
      });
}

Tensor cross_entropy_with_logits(const Tensor& logits, std::span<const std::int32_t> targets,
                                 std::span<const double> weights) {
  require_rank2(logits, "cross_entropy_with_logits");
  const std::size_t m = logits.rows(), n = logits.cols();
  if (targets.size() != m || (!weights.empty() && weights.size() != m)) {
    throw EngineError("cross_entropy_with_logits: " + std::to_string(targets.size()) +
                      " targets for logits " + shape_string(logits.shape()));
  }
  Buffer w(m, 1.0);
  if (!weights.empty()) w.assign(weights.begin(), weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= n) {
      throw EngineError("cross_entropy_with_logits: target " + std::to_string(targets[i]) +
                        " out of range for " + std::to_string(n) + " classes");
    }
    if (w[i] == 0.0) continue;
    const double* row = logits.data().data() + i * n;
    total += w[i] * (log_sum_exp(row, n) - row[targets[i]]);
  }
  std::vector<std::int32_t> tg(targets.begin(), targets.end());
  return make_result({}, {total}, {logits},
                     [m, n, tg = std::move(tg), w = std::move(w)](Node& self) {
                       Node& x = *self.inputs[0];
                       if (!x.requires_grad) return;
                       auto& gx = x.grad_buffer();
                       Buffer p(n);
                       for (std::size_t i = 0; i < m; ++i) {
                         if (w[i] == 0.0) continue;
                         const double coef = self.grad[0] * w[i];
                         softmax_row(x.value.data() + i * n, p.data(), n);
                         p[static_cast<std::size_t>(tg[i])] -= 1.0;
                         for (std::size_t c = 0; c < n; ++c) gx[i * n + c] += coef * p[c];
                       }
                     });
}

}  // namespace mdplan::tensor
