#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "gca/matrix.hpp"

// Reverse-mode autodiff over a per-step tape. The graph is rebuilt every
// training step; nodes hold dense matrices and a backward closure. Ops only
// allocate gradients for nodes on a path to a parameter.
//
// Gradient conventions that the rest of the project relies on:
//   * stop_grad blocks all flow to its parent (the C(·) operator),
//   * hard_threshold_st is the straight-through estimator: forward values in
//     {0,1}, backward identity onto the soft parent,
//   * l1/abs ops use sign subgradients (0 at exact zero).

namespace gca::ad {

class Tape;

struct Var {
  Tape* tape = nullptr;
  int idx = -1;

  bool valid() const { return tape != nullptr && idx >= 0; }
  const Matrix& val() const;
  std::size_t rows() const { return val().rows(); }
  std::size_t cols() const { return val().cols(); }
  double scalar() const;  // requires a 1x1 node
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var input(Matrix value, bool needs_grad = false);
  Var make(Matrix value, std::vector<int> parents,
           std::function<void(Tape&, int)> backward);

  void backward(Var loss);

  const Matrix& val(int idx) const { return nodes_[idx].val; }
  Matrix& grad(int idx);          // allocates zeroed storage on first touch
  bool has_grad(int idx) const { return nodes_[idx].grad_live; }
  bool needs_grad(int idx) const { return nodes_[idx].needs_grad; }

  // Gradient of a leaf after backward(); zero matrix if it was never touched.
  Matrix grad_of(Var v);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix val;
    Matrix grad;
    std::vector<int> parents;
    std::function<void(Tape&, int)> backward;
    bool needs_grad = false;
    bool grad_live = false;
  };
  std::vector<Node> nodes_;

  friend struct Var;
};

// ---- ops ----

Var matmul(Var a, Var b);                       // A(m,k)·B(k,n)
Var linear(Var x, Var w, Var b);                // X·W + row-broadcast bias
Var add(Var a, Var b);                          // same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);                          // elementwise
Var scale(Var a, double c);
Var add_const(Var a, const Matrix& c);          // constant offset (no grad into c)
Var tanh_op(Var x);
Var sigmoid_op(Var x);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var x, std::size_t col0, std::size_t ncols);
Var reshape(Var x, std::size_t rows, std::size_t cols);
Var broadcast_row(Var row, std::size_t nrows);  // (1,m) -> (n,m)

// out[(i,u),v] = Z(i,v) * S(i*D+u, v): per-output-row gating of one lag input.
Var row_gate(Var z, Var s);

// sigmoid((logits + noise)/tau) — the binary concrete / Gumbel-softmax sample.
Var gumbel_soft(Var logit_diff, const Matrix& noise, double tau);
Var hard_threshold_st(Var soft);                // forward {0,1}, backward identity
Var stop_grad(Var x);

Var sum_all(Var x);                             // 1x1
Var mean_all(Var x);                            // 1x1
Var mse(Var pred, const Matrix& target);        // mean over all entries
Var mse_col(Var pred, const Matrix& target, std::size_t col);
Var l1_sum(Var x);                              // Σ|x|
Var l2_norm(Var x);                             // sqrt(Σx²)
Var l2_rows_sum(Var x);                         // Σᵢ ‖row i‖₂
Var abs_mean_diff(Var a, Var b);                // mean|a−b|
// Σ over entries of Bernoulli KL(q ‖ p), q clamped to [eps, 1−eps].
Var kl_bernoulli_sum(Var q, double p, double eps = 1e-6);

}  // namespace gca::ad
