#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "gca/autodiff.hpp"
#include "gca/matrix.hpp"
#include "gca/rng.hpp"

namespace gca::model {

// Trainable tensor with its gradient and optimizer moments. Params live in a
// ParamStore deque so their addresses stay stable for the whole run.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;  // Adam first moment
  Matrix v;  // Adam second moment

  Param(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols),
        m(rows, cols), v(rows, cols) {}

  void zero_grad() { grad.setZero(); }
};

class ParamStore {
 public:
  Param* add(const std::string& name, std::size_t rows, std::size_t cols) {
    params_.emplace_back(name, rows, cols);
    return &params_.back();
  }
  std::vector<Param*> all() {
    std::vector<Param*> out;
    for (auto& p : params_) out.push_back(&p);
    return out;
  }
  std::size_t size() const { return params_.size(); }

 private:
  std::deque<Param> params_;
};

// One training/eval step's graph. bind() caches the tape node per Param so
// gradient contributions from every use accumulate in a single node.
struct GraphCtx {
  ad::Tape& tape;
  bool train = true;  // false: params enter the tape without gradient tracking

  GraphCtx(ad::Tape& t, bool train_mode) : tape(t), train(train_mode) {}

  ad::Var bind(Param& p) {
    auto it = bound_.find(&p);
    if (it != bound_.end()) return it->second;
    ad::Var v = tape.input(p.value, train);
    bound_.emplace(&p, v);
    return v;
  }

  // Copies accumulated tape gradients back into the Params.
  void flush_grads() {
    for (auto& [param, var] : bound_) {
      if (!tape.needs_grad(var.idx)) continue;
      Matrix g = tape.grad_of(var);
      for (std::size_t i = 0; i < g.size(); ++i) param->grad[i] += g[i];
    }
  }

 private:
  std::unordered_map<Param*, ad::Var> bound_;
};

// Dense layers with tanh between them; the output layer is linear.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& name,
      const std::vector<std::size_t>& widths);

  ad::Var forward(GraphCtx& ctx, ad::Var x) const;
  void init(Rng& rng);  // Glorot-uniform weights, zero biases
  void zero_output_layer();

  const std::vector<Param*>& weights() const { return weights_; }

 private:
  std::vector<Param*> weights_;
  std::vector<Param*> biases_;
};

enum class Variant { gca, gca_r, gca_e, gca_s, gca_alpha, lstm_st };

Variant variant_from_string(const std::string& s);
std::string variant_to_string(Variant v);

}  // namespace gca::model
