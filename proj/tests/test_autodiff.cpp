#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "gca/autodiff.hpp"
#include "gca/errors.hpp"
#include "gca/matrix.hpp"
#include "gca/rng.hpp"

using namespace gca;
using namespace gca::ad;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.5,
                     double hi = 1.5) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(lo, hi);
  return m;
}

// Central finite differences over every entry of every input; the loss is a
// closure from input matrices to a scalar computed on a fresh tape.
void gradcheck(std::vector<Matrix> inputs,
               const std::function<double(Tape&, std::vector<Var>&)>& loss_fn,
               double eps = 1e-5, double tol = 1e-6) {
  // analytic gradients
  Tape tape;
  std::vector<Var> vars;
  for (const auto& m : inputs) vars.push_back(tape.input(m, true));
  Tape* tp = &tape;
  double base = loss_fn(*tp, vars);
  (void)base;
  std::vector<Matrix> analytic;
  for (auto v : vars) analytic.push_back(tape.grad_of(v));

  for (std::size_t q = 0; q < inputs.size(); ++q) {
    for (std::size_t i = 0; i < inputs[q].size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<Matrix> shifted = inputs;
        shifted[q][i] += delta;
        Tape t2;
        std::vector<Var> v2;
        for (const auto& m : shifted) v2.push_back(t2.input(m, false));
        return loss_fn(t2, v2);
      };
      const double fd = (eval(eps) - eval(-eps)) / (2.0 * eps);
      const double an = analytic[q][i];
      const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
      CHECK(std::abs(fd - an) <= tol * scale);
    }
  }
}

double run_loss(Tape& t, Var loss, bool do_backward) {
  if (do_backward) t.backward(loss);
  return loss.scalar();
}

}  // namespace

TEST_CASE("matmul/linear/tanh chain gradients match finite differences") {
  Rng rng(1);
  Matrix x = random_matrix(4, 3, rng);
  Matrix w = random_matrix(3, 5, rng);
  Matrix b = random_matrix(1, 5, rng);
  gradcheck({x, w, b}, [](Tape& t, std::vector<Var>& v) {
    Var y = tanh_op(linear(v[0], v[1], v[2]));
    Var l = mean_all(mul(y, y));
    return run_loss(t, l, t.needs_grad(v[0].idx));
  });
}

TEST_CASE("elementwise and reduction op gradients") {
  Rng rng(2);
  Matrix a = random_matrix(3, 4, rng);
  Matrix b = random_matrix(3, 4, rng);
  gradcheck({a, b}, [](Tape& t, std::vector<Var>& v) {
    Var s = add(mul(sigmoid_op(v[0]), v[1]), scale(v[0], 0.3));
    Var l = sum_all(mul(s, s));
    return run_loss(t, scale(l, 0.25), t.needs_grad(v[0].idx));
  });
}

TEST_CASE("concat/slice/reshape/broadcast gradients") {
  Rng rng(3);
  Matrix a = random_matrix(4, 2, rng);
  Matrix b = random_matrix(4, 3, rng);
  Matrix r = random_matrix(1, 5, rng);
  gradcheck({a, b, r}, [](Tape& t, std::vector<Var>& v) {
    Var c = concat_cols({v[0], v[1]});          // 4x5
    Var br = broadcast_row(v[2], 4);            // 4x5
    Var m = mul(c, br);
    Var s = slice_cols(m, 1, 3);                // 4x3
    Var rs = reshape(s, 2, 6);
    Var l = mean_all(mul(rs, rs));
    return run_loss(t, l, t.needs_grad(v[0].idx));
  });
}

TEST_CASE("row_gate gradient and masking semantics") {
  Rng rng(4);
  const std::size_t n = 3, d = 4;
  Matrix z = random_matrix(n, d, rng);
  Matrix s = random_matrix(n * d, d, rng, 0.0, 1.0);
  gradcheck({z, s}, [](Tape& t, std::vector<Var>& v) {
    Var g = row_gate(v[0], v[1]);
    Var l = mean_all(mul(g, g));
    return run_loss(t, l, t.needs_grad(v[0].idx));
  });

  // value check against direct formula
  Tape t;
  Var zv = t.input(z), sv = t.input(s);
  Var g = row_gate(zv, sv);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t u = 0; u < d; ++u)
      for (std::size_t vcol = 0; vcol < d; ++vcol)
        CHECK(g.val()(i * d + u, vcol) ==
              doctest::Approx(z(i, vcol) * s(i * d + u, vcol)));
}

TEST_CASE("loss op gradients: mse, mse_col, l1, l2, abs_mean_diff, kl") {
  Rng rng(5);
  Matrix p = random_matrix(4, 3, rng);
  Matrix q = random_matrix(4, 3, rng);
  Matrix target = random_matrix(4, 3, rng);

  gradcheck({p}, [&](Tape& t, std::vector<Var>& v) {
    return run_loss(t, mse(v[0], target), t.needs_grad(v[0].idx));
  });
  gradcheck({p}, [&](Tape& t, std::vector<Var>& v) {
    return run_loss(t, mse_col(v[0], target, 1), t.needs_grad(v[0].idx));
  });
  gradcheck({p}, [](Tape& t, std::vector<Var>& v) {
    return run_loss(t, l1_sum(v[0]), t.needs_grad(v[0].idx));
  });
  gradcheck({p}, [](Tape& t, std::vector<Var>& v) {
    return run_loss(t, l2_norm(v[0]), t.needs_grad(v[0].idx));
  });
  gradcheck({p, q}, [](Tape& t, std::vector<Var>& v) {
    return run_loss(t, abs_mean_diff(v[0], v[1]), t.needs_grad(v[0].idx));
  });

  Matrix probs(2, 3);
  Rng prng(6);
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = prng.uniform(0.05, 0.95);
  gradcheck({probs}, [](Tape& t, std::vector<Var>& v) {
    return run_loss(t, kl_bernoulli_sum(v[0], 0.1), t.needs_grad(v[0].idx));
  });
}

TEST_CASE("gumbel_soft gradient with fixed noise") {
  Rng rng(7);
  Matrix logits = random_matrix(3, 5, rng);
  Matrix noise = random_matrix(3, 5, rng);
  for (double tau : {1.0, 0.5}) {
    gradcheck({logits}, [&](Tape& t, std::vector<Var>& v) {
      Var s = gumbel_soft(v[0], noise, tau);
      return run_loss(t, mean_all(mul(s, s)), t.needs_grad(v[0].idx));
    });
  }
}

TEST_CASE("stop_grad blocks flow exactly") {
  Rng rng(8);
  Matrix a = random_matrix(3, 3, rng);
  Tape t;
  Var av = t.input(a, true);
  Var blocked = stop_grad(scale(av, 2.0));
  Var open = scale(av, 3.0);
  Var l = add(sum_all(mul(blocked, blocked)), sum_all(open));
  t.backward(l);
  Matrix g = t.grad_of(av);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == 3.0);
}

TEST_CASE("straight-through hard sample: forward binary, backward soft gradient") {
  Rng rng(9);
  Matrix logits = random_matrix(4, 4, rng);
  Matrix noise = random_matrix(4, 4, rng);
  Matrix weights = random_matrix(4, 4, rng);

  auto grads = [&](bool hard) {
    Tape t;
    Var lv = t.input(logits, true);
    Var s = gumbel_soft(lv, noise, 0.7);
    if (hard) s = hard_threshold_st(s);
    // linear functional of the sample, so hard and soft gradients must agree
    Var l = sum_all(mul(s, t.input(weights)));
    t.backward(l);
    if (hard) {
      for (std::size_t i = 0; i < s.val().size(); ++i) {
        const double v = s.val()[i];
        CHECK((v == 0.0 || v == 1.0));
      }
    }
    return t.grad_of(lv);
  };
  Matrix gh = grads(true);
  Matrix gs = grads(false);
  for (std::size_t i = 0; i < gh.size(); ++i) CHECK(gh[i] == gs[i]);
}

TEST_CASE("shape errors are reported") {
  Tape t;
  Var a = t.input(Matrix(2, 3));
  Var b = t.input(Matrix(2, 3));
  CHECK_THROWS_AS((void)matmul(a, b), ShapeError);
  CHECK_THROWS_AS((void)slice_cols(a, 2, 2), ShapeError);
  CHECK_THROWS_AS((void)t.backward(a), ShapeError);
}
