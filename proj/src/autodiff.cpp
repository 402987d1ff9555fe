#include "gca/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "gca/errors.hpp"
#include "gca/kernels.hpp"

namespace gca::ad {

const Matrix& Var::val() const { return tape->val(idx); }

double Var::scalar() const {
  const Matrix& m = val();
  if (m.size() != 1) throw ShapeError("Var::scalar: node is not 1x1");
  return m[0];
}

Var Tape::input(Matrix value, bool needs_grad) {
  Node n;
  n.val = std::move(value);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::make(Matrix value, std::vector<int> parents,
               std::function<void(Tape&, int)> backward) {
  Node n;
  n.val = std::move(value);
  for (int p : parents) {
    if (nodes_[p].needs_grad) {
      n.needs_grad = true;
      break;
    }
  }
  n.parents = std::move(parents);
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad(int idx) {
  Node& n = nodes_[idx];
  if (!n.grad_live) {
    n.grad = Matrix(n.val.rows(), n.val.cols());
    n.grad_live = true;
  }
  return n.grad;
}

Matrix Tape::grad_of(Var v) {
  const Node& n = nodes_[v.idx];
  if (n.grad_live) return n.grad;
  return Matrix(n.val.rows(), n.val.cols());
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw ShapeError("Tape::backward: foreign var");
  if (val(loss.idx).size() != 1) throw ShapeError("Tape::backward: loss must be 1x1");
  grad(loss.idx)[0] = 1.0;
  for (int i = loss.idx; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.grad_live || !n.backward) continue;
    n.backward(*this, i);
  }
}

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw ShapeError("op: vars from different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dims differ");
  Tape& t = *a.tape;
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Matrix y(m, n);
  kern::gemm_nn(m, n, k, a.val().data(), k, b.val().data(), n, y.data(), n, false);
  const int ia = a.idx, ib = b.idx;
  return t.make(std::move(y), {ia, ib}, [ia, ib, m, k, n](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(ia)) {
      kern::gemm_nt(m, k, n, dy.data(), n, t.val(ib).data(), n,
                    t.grad(ia).data(), k, true);
    }
    if (t.needs_grad(ib)) {
      kern::gemm_tn(k, n, m, t.val(ia).data(), k, dy.data(), n,
                    t.grad(ib).data(), n, true);
    }
  });
}

Var linear(Var x, Var w, Var b) {
  check_same_tape(x, w);
  check_same_tape(x, b);
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols())
    throw ShapeError("linear: shape mismatch");
  Tape& t = *x.tape;
  const std::size_t m = x.rows(), k = x.cols(), n = w.cols();
  Matrix y(m, n);
  kern::gemm_nn(m, n, k, x.val().data(), k, w.val().data(), n, y.data(), n, false);
  kern::add_bias_rows(m, n, b.val().data(), y.data(), n);
  const int ix = x.idx, iw = w.idx, ib = b.idx;
  return t.make(std::move(y), {ix, iw, ib}, [ix, iw, ib, m, k, n](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(ix)) {
      kern::gemm_nt(m, k, n, dy.data(), n, t.val(iw).data(), n,
                    t.grad(ix).data(), k, true);
    }
    if (t.needs_grad(iw)) {
      kern::gemm_tn(k, n, m, t.val(ix).data(), k, dy.data(), n,
                    t.grad(iw).data(), n, true);
    }
    if (t.needs_grad(ib)) {
      kern::colsum_acc(m, n, dy.data(), n, t.grad(ib).data());
    }
  });
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  if (!a.val().same_shape(b.val())) throw ShapeError("add: shape mismatch");
  Tape& t = *a.tape;
  Matrix y(a.rows(), a.cols());
  kern::vadd(y.size(), a.val().data(), b.val().data(), y.data());
  const int ia = a.idx, ib = b.idx;
  return t.make(std::move(y), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(ia)) kern::axpy(dy.size(), 1.0, dy.data(), t.grad(ia).data());
    if (t.needs_grad(ib)) kern::axpy(dy.size(), 1.0, dy.data(), t.grad(ib).data());
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  if (!a.val().same_shape(b.val())) throw ShapeError("sub: shape mismatch");
  Tape& t = *a.tape;
  Matrix y(a.rows(), a.cols());
  kern::vsub(y.size(), a.val().data(), b.val().data(), y.data());
  const int ia = a.idx, ib = b.idx;
  return t.make(std::move(y), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(ia)) kern::axpy(dy.size(), 1.0, dy.data(), t.grad(ia).data());
    if (t.needs_grad(ib)) kern::axpy(dy.size(), -1.0, dy.data(), t.grad(ib).data());
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  if (!a.val().same_shape(b.val())) throw ShapeError("mul: shape mismatch");
  Tape& t = *a.tape;
  Matrix y(a.rows(), a.cols());
  kern::vmul(y.size(), a.val().data(), b.val().data(), y.data());
  const int ia = a.idx, ib = b.idx;
  return t.make(std::move(y), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(ia))
      kern::vmul_acc(dy.size(), dy.data(), t.val(ib).data(), t.grad(ia).data());
    if (t.needs_grad(ib))
      kern::vmul_acc(dy.size(), dy.data(), t.val(ia).data(), t.grad(ib).data());
  });
}

Var scale(Var a, double c) {
  Tape& t = *a.tape;
  Matrix y = a.val();
  kern::scal(y.size(), c, y.data());
  const int ia = a.idx;
  return t.make(std::move(y), {ia}, [ia, c](Tape& t, int self) {
    kern::axpy(t.grad(self).size(), c, t.grad(self).data(), t.grad(ia).data());
  });
}

Var add_const(Var a, const Matrix& c) {
  if (!a.val().same_shape(c)) throw ShapeError("add_const: shape mismatch");
  Tape& t = *a.tape;
  Matrix y(a.rows(), a.cols());
  kern::vadd(y.size(), a.val().data(), c.data(), y.data());
  const int ia = a.idx;
  return t.make(std::move(y), {ia}, [ia](Tape& t, int self) {
    kern::axpy(t.grad(self).size(), 1.0, t.grad(self).data(), t.grad(ia).data());
  });
}

Var tanh_op(Var x) {
  Tape& t = *x.tape;
  Matrix y(x.rows(), x.cols());
  kern::tanh_fwd(y.size(), x.val().data(), y.data());
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix](Tape& t, int self) {
    kern::tanh_bwd_acc(t.grad(self).size(), t.val(self).data(),
                       t.grad(self).data(), t.grad(ix).data());
  });
}

Var sigmoid_op(Var x) {
  Tape& t = *x.tape;
  Matrix y(x.rows(), x.cols());
  kern::sigmoid_fwd(y.size(), x.val().data(), y.data());
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix](Tape& t, int self) {
    kern::sigmoid_bwd_acc(t.grad(self).size(), t.val(self).data(),
                          t.grad(self).data(), t.grad(ix).data());
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no parts");
  Tape& t = *parts[0].tape;
  const std::size_t m = parts[0].rows();
  std::size_t total = 0;
  std::vector<int> idx;
  std::vector<std::size_t> widths;
  for (Var p : parts) {
    check_same_tape(parts[0], p);
    if (p.rows() != m) throw ShapeError("concat_cols: row count mismatch");
    idx.push_back(p.idx);
    widths.push_back(p.cols());
    total += p.cols();
  }
  Matrix y(m, total);
  std::size_t off = 0;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const Matrix& src = t.val(idx[q]);
    for (std::size_t i = 0; i < m; ++i) {
      std::memcpy(y.row(i) + off, src.row(i), widths[q] * sizeof(double));
    }
    off += widths[q];
  }
  return t.make(std::move(y), idx, [idx, widths, m, total](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    std::size_t off = 0;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      if (t.needs_grad(idx[q])) {
        Matrix& g = t.grad(idx[q]);
        for (std::size_t i = 0; i < m; ++i) {
          kern::axpy(widths[q], 1.0, dy.row(i) + off, g.row(i));
        }
      }
      off += widths[q];
    }
    (void)total;
  });
}

Var slice_cols(Var x, std::size_t col0, std::size_t ncols) {
  if (col0 + ncols > x.cols()) throw ShapeError("slice_cols: out of range");
  Tape& t = *x.tape;
  const std::size_t m = x.rows();
  Matrix y(m, ncols);
  for (std::size_t i = 0; i < m; ++i) {
    std::memcpy(y.row(i), x.val().row(i) + col0, ncols * sizeof(double));
  }
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix, col0, ncols, m](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    Matrix& g = t.grad(ix);
    for (std::size_t i = 0; i < m; ++i) {
      kern::axpy(ncols, 1.0, dy.row(i), g.row(i) + col0);
    }
  });
}

Var reshape(Var x, std::size_t rows, std::size_t cols) {
  if (rows * cols != x.val().size()) throw ShapeError("reshape: size mismatch");
  Tape& t = *x.tape;
  Matrix y = x.val().reshaped(rows, cols);
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix](Tape& t, int self) {
    kern::axpy(t.grad(self).size(), 1.0, t.grad(self).data(), t.grad(ix).data());
  });
}

Var broadcast_row(Var row, std::size_t nrows) {
  if (row.rows() != 1) throw ShapeError("broadcast_row: expected 1 row");
  Tape& t = *row.tape;
  const std::size_t n = row.cols();
  Matrix y(nrows, n);
  for (std::size_t i = 0; i < nrows; ++i) {
    std::memcpy(y.row(i), row.val().data(), n * sizeof(double));
  }
  const int ir = row.idx;
  return t.make(std::move(y), {ir}, [ir, nrows, n](Tape& t, int self) {
    kern::colsum_acc(nrows, n, t.grad(self).data(), n, t.grad(ir).data());
  });
}

Var row_gate(Var z, Var s) {
  check_same_tape(z, s);
  const std::size_t n = z.rows(), d = z.cols();
  if (s.cols() != d || s.rows() != n * d) throw ShapeError("row_gate: shape mismatch");
  Tape& t = *z.tape;
  Matrix y(n * d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zrow = z.val().row(i);
    for (std::size_t u = 0; u < d; ++u) {
      kern::vmul(d, zrow, s.val().row(i * d + u), y.row(i * d + u));
    }
  }
  const int iz = z.idx, is = s.idx;
  return t.make(std::move(y), {iz, is}, [iz, is, n, d](Tape& t, int self) {
    const Matrix& dy = t.grad(self);
    if (t.needs_grad(iz)) {
      Matrix& gz = t.grad(iz);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t u = 0; u < d; ++u) {
          kern::vmul_acc(d, dy.row(i * d + u), t.val(is).row(i * d + u), gz.row(i));
        }
      }
    }
    if (t.needs_grad(is)) {
      Matrix& gs = t.grad(is);
      for (std::size_t i = 0; i < n; ++i) {
        const double* zrow = t.val(iz).row(i);
        for (std::size_t u = 0; u < d; ++u) {
          kern::vmul_acc(d, dy.row(i * d + u), zrow, gs.row(i * d + u));
        }
      }
    }
  });
}

Var gumbel_soft(Var logit_diff, const Matrix& noise, double tau) {
  if (!logit_diff.val().same_shape(noise)) throw ShapeError("gumbel_soft: noise shape");
  if (!(tau > 0.0)) throw ShapeError("gumbel_soft: tau must be positive");
  Tape& t = *logit_diff.tape;
  const std::size_t sz = noise.size();
  Matrix pre(logit_diff.rows(), logit_diff.cols());
  kern::vadd(sz, logit_diff.val().data(), noise.data(), pre.data());
  kern::scal(sz, 1.0 / tau, pre.data());
  Matrix y(pre.rows(), pre.cols());
  kern::sigmoid_fwd(sz, pre.data(), y.data());
  const int il = logit_diff.idx;
  return t.make(std::move(y), {il}, [il, tau](Tape& t, int self) {
    const Matrix& y = t.val(self);
    const Matrix& dy = t.grad(self);
    Matrix& g = t.grad(il);
    const double inv_tau = 1.0 / tau;
    for (std::size_t i = 0; i < y.size(); ++i) {
      g[i] += dy[i] * y[i] * (1.0 - y[i]) * inv_tau;
    }
  });
}

Var hard_threshold_st(Var soft) {
  Tape& t = *soft.tape;
  Matrix y(soft.rows(), soft.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = soft.val()[i] >= 0.5 ? 1.0 : 0.0;
  const int is = soft.idx;
  return t.make(std::move(y), {is}, [is](Tape& t, int self) {
    kern::axpy(t.grad(self).size(), 1.0, t.grad(self).data(), t.grad(is).data());
  });
}

Var stop_grad(Var x) {
  Tape& t = *x.tape;
  // No parents registered: gradients cannot reach x.
  return t.input(x.val(), false);
}

Var sum_all(Var x) {
  Tape& t = *x.tape;
  Matrix y(1, 1);
  y[0] = kern::sum(x.val().size(), x.val().data());
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix](Tape& t, int self) {
    const double d = t.grad(self)[0];
    Matrix& g = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
  });
}

Var mean_all(Var x) { return scale(sum_all(x), 1.0 / static_cast<double>(x.val().size())); }

Var mse(Var pred, const Matrix& target) {
  if (!pred.val().same_shape(target)) throw ShapeError("mse: shape mismatch");
  Tape& t = *pred.tape;
  const std::size_t sz = target.size();
  double s = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    const double e = pred.val()[i] - target[i];
    s += e * e;
  }
  Matrix y(1, 1);
  y[0] = s / static_cast<double>(sz);
  const int ip = pred.idx;
  Matrix tgt = target;
  return t.make(std::move(y), {ip}, [ip, tgt = std::move(tgt)](Tape& t, int self) {
    const double d = 2.0 * t.grad(self)[0] / static_cast<double>(tgt.size());
    Matrix& g = t.grad(ip);
    const Matrix& p = t.val(ip);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += d * (p[i] - tgt[i]);
  });
}

Var mse_col(Var pred, const Matrix& target, std::size_t col) {
  if (!pred.val().same_shape(target)) throw ShapeError("mse_col: shape mismatch");
  if (col >= pred.cols()) throw ShapeError("mse_col: column out of range");
  Tape& t = *pred.tape;
  const std::size_t m = pred.rows(), n = pred.cols();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = pred.val()(i, col) - target(i, col);
    s += e * e;
  }
  Matrix y(1, 1);
  y[0] = s / static_cast<double>(m);
  const int ip = pred.idx;
  Matrix tgt = target;
  return t.make(std::move(y), {ip}, [ip, col, m, n, tgt = std::move(tgt)](Tape& t, int self) {
    const double d = 2.0 * t.grad(self)[0] / static_cast<double>(m);
    Matrix& g = t.grad(ip);
    const Matrix& p = t.val(ip);
    for (std::size_t i = 0; i < m; ++i) {
      g[i * n + col] += d * (p(i, col) - tgt(i, col));
    }
  });
}

Var l1_sum(Var x) {
  Tape& t = *x.tape;
  Matrix y(1, 1);
  y[0] = kern::asum(x.val().size(), x.val().data());
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix](Tape& t, int self) {
    const double d = t.grad(self)[0];
    Matrix& g = t.grad(ix);
    const Matrix& v = t.val(ix);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += d * (v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0));
    }
  });
}

Var l2_norm(Var x) {
  Tape& t = *x.tape;
  const double norm = std::sqrt(kern::sumsq(x.val().size(), x.val().data()));
  Matrix y(1, 1);
  y[0] = norm;
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix, norm](Tape& t, int self) {
    if (norm <= 0.0) return;  // subgradient 0 at the origin
    const double d = t.grad(self)[0] / norm;
    kern::axpy(t.grad(ix).size(), d, t.val(ix).data(), t.grad(ix).data());
  });
}

Var l2_rows_sum(Var x) {
  Tape& t = *x.tape;
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> norms(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    norms[i] = std::sqrt(kern::sumsq(n, x.val().row(i)));
    s += norms[i];
  }
  Matrix y(1, 1);
  y[0] = s;
  const int ix = x.idx;
  return t.make(std::move(y), {ix}, [ix, norms = std::move(norms), n](Tape& t, int self) {
    const double d = t.grad(self)[0];
    Matrix& g = t.grad(ix);
    const Matrix& v = t.val(ix);
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] <= 0.0) continue;
      kern::axpy(n, d / norms[i], v.row(i), g.row(i));
    }
  });
}

Var abs_mean_diff(Var a, Var b) {
  check_same_tape(a, b);
  if (!a.val().same_shape(b.val())) throw ShapeError("abs_mean_diff: shape mismatch");
  Tape& t = *a.tape;
  const std::size_t sz = a.val().size();
  double s = 0.0;
  for (std::size_t i = 0; i < sz; ++i) s += std::abs(a.val()[i] - b.val()[i]);
  Matrix y(1, 1);
  y[0] = s / static_cast<double>(sz);
  const int ia = a.idx, ib = b.idx;
  return t.make(std::move(y), {ia, ib}, [ia, ib, sz](Tape& t, int self) {
    const double d = t.grad(self)[0] / static_cast<double>(sz);
    const Matrix& av = t.val(ia);
    const Matrix& bv = t.val(ib);
    for (std::size_t i = 0; i < sz; ++i) {
      const double diff = av[i] - bv[i];
      const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      if (t.needs_grad(ia)) t.grad(ia)[i] += d * sgn;
      if (t.needs_grad(ib)) t.grad(ib)[i] -= d * sgn;
    }
  });
}

Var kl_bernoulli_sum(Var q, double p, double eps) {
  if (!(p > 0.0 && p < 1.0)) throw ShapeError("kl_bernoulli_sum: p out of (0,1)");
  Tape& t = *q.tape;
  const std::size_t sz = q.val().size();
  const double lo = eps, hi = 1.0 - eps;
  double s = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    double qi = q.val()[i];
    qi = qi < lo ? lo : (qi > hi ? hi : qi);
    s += qi * std::log(qi / p) + (1.0 - qi) * std::log((1.0 - qi) / (1.0 - p));
  }
  Matrix y(1, 1);
  y[0] = s;
  const int iq = q.idx;
  return t.make(std::move(y), {iq}, [iq, p, lo, hi](Tape& t, int self) {
    const double d = t.grad(self)[0];
    const Matrix& qv = t.val(iq);
    Matrix& g = t.grad(iq);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double qi = qv[i];
      if (qi <= lo || qi >= hi) continue;  // clamped region, flat
      g[i] += d * (std::log(qi / p) - std::log((1.0 - qi) / (1.0 - p)));
    }
  });
}

}  // namespace gca::ad
