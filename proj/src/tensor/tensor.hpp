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

// Define-by-run reverse-mode differentiation over dense double tensors.
//
// A Tensor is a handle to a graph node. Operations on tensors that require
// gradients record their inputs and a backward rule; backward() walks the
// recorded graph in reverse topological order and accumulates gradients into
// leaves. Graphs are rebuilt every step and die with their last handle.
//
// Only rank 0, 1 and 2 tensors are supported; this is all the planner needs.

#ifndef MDPLAN_TENSOR_TENSOR_HPP_
#define MDPLAN_TENSOR_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mdplan::tensor {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

/// Storage with a fixed SIMD alignment. Vectorized reductions peel a
/// different head depending on the start address, so unaligned buffers would
/// make results depend on where the allocator happened to put them.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

std::string shape_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

struct Node {
  Shape shape;
  Buffer value;
  Buffer grad;  // empty means "no gradient accumulated"
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  /// Gradient buffer, zero-allocated on first use.
  Buffer& grad_buffer();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const { return node_->value; }
  /// Direct write access. Only meaningful on leaves (parameters, inputs).
  std::span<double> mutable_data() { return node_->value; }
  double item() const;
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  void clear_grad() { Buffer().swap(node_->grad); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared_node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Whether new operations record backward rules on this thread.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Accumulates d(loss)/d(leaf) into every reachable leaf requiring grad.
void backward(const Tensor& loss);

/// Value-identical leaf that blocks gradient flow to everything upstream.
Tensor stop_gradient(const Tensor& x);

// -- operations --------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// a[m,n] + bias[n] broadcast over rows.
Tensor add_bias(const Tensor& a, const Tensor& bias);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);
Tensor gelu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor minimum(const Tensor& a, const Tensor& b);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Row-wise layer normalization with affine gamma/beta of length cols.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
Tensor softmax_rows(const Tensor& x);
Tensor log_softmax_rows(const Tensor& x);

/// Rows of `table` at `ids`; ids are validated against the table height.
Tensor embedding_lookup(const Tensor& table, std::span<const std::int32_t> ids);
Tensor index_select_rows(const Tensor& x, std::span<const std::size_t> rows);
Tensor concat_rows(std::span<const Tensor> parts);
/// out[i] = x[i, cols[i]].
Tensor gather_cols(const Tensor& x, std::span<const std::int32_t> cols);

/// Bidirectional scaled dot-product attention; heads split the columns.
Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, int n_heads);

/// sum_i w_i * (-log softmax(logits_i)[target_i]). Empty weights mean 1.
Tensor cross_entropy_with_logits(const Tensor& logits, std::span<const std::int32_t> targets,
                                 std::span<const double> weights = {});

}  // namespace mdplan::tensor

#endif  // MDPLAN_TENSOR_TENSOR_HPP_
