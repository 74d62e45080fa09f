#include <doctest.h>

#include <functional>

#include "homegcl/autodiff/ops.hpp"
#include "homegcl/core/rng.hpp"

using namespace homegcl;
using ad::Mat;
using ad::Var;

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

using Fn = std::function<Var(ad::Tape&, const std::vector<Var>&)>;

// Max relative error between tape gradients and central differences.
double check(const Fn& f, std::vector<Mat> inputs) {
  ad::Tape tape;
  std::vector<Var> vars;
  for (const auto& m : inputs) vars.push_back(tape.leaf(m));
  Var out = f(tape, vars);
  tape.backward(out);
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Mat analytic = tape.has_grad(vars[k]) ? tape.grad(vars[k]) : Mat::Zero(inputs[k].rows(), inputs[k].cols());
    for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
      auto eval = [&](double delta) {
        auto in = inputs;
        in[k].data()[i] += delta;
        ad::Tape t2;
        std::vector<Var> v2;
        for (const auto& m : in) v2.push_back(t2.constant(m));
        return f(t2, v2).scalar();
      };
      const double h = 1e-6;
      const double numeric = (eval(h) - eval(-h)) / (2 * h);
      const double a = analytic.data()[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("op gradients match central differences") {
  Rng rng(1);
  const Mat A = random_mat(rng, 4, 3), B = random_mat(rng, 3, 5), C = random_mat(rng, 4, 3), W = random_mat(rng, 1, 3);
  const double tol = 1e-7;
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::matmul(v[0], v[1])); }, {A, B}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::hadamard(ad::matmul_nt(v[0], v[1]), ad::matmul_nt(v[0], v[1]))); },
              {A, C}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::hadamard(ad::transpose(v[0]), ad::transpose(v[0]))); }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::mean(ad::hadamard(ad::sub(v[0], v[1]), ad::add(v[0], v[1]))); }, {A, C}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::elu(ad::add_row(v[0], v[1]))); }, {A, W}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::relu(ad::scale(v[0], 2.0))); }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::log_sigmoid(ad::add_scalar(v[0], 0.3))); }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::hadamard(ad::sigmoid(v[0]), v[0])); }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::hadamard(ad::l2_normalize_rows(v[0]), v[1])); }, {A, C}) < tol);
  CHECK(check([](ad::Tape&, auto& v) { return ad::sum(ad::row_dot(v[0], v[1])); }, {A, C}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var s = ad::gather_rows(v[0], {2, 0, 2, 3});
          return ad::sum(ad::hadamard(s, s));
        }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var s = ad::scatter_add_rows(v[0], {1, 1, 0, 2}, 3);
          return ad::sum(ad::hadamard(s, s));
        }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var c = ad::concat_cols({v[0], v[1]});
          Var r = ad::concat_rows({v[0], v[1]});
          return ad::add(ad::sum(ad::hadamard(ad::slice_cols(c, 2, 3), ad::slice_cols(c, 1, 3))),
                         ad::sum(ad::elu(ad::slice_rows(r, 3, 2))));
        }, {A, C}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var m = ad::mean_rows(v[0]);
          return ad::sum(ad::hadamard(m, m));
        }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var s = ad::matmul_nt(v[0], v[0]);
          return ad::sum(ad::hadamard(ad::diag(s), ad::diag(s)));
        }, {A}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask(4, 3);
          mask.setConstant(true);
          mask(0, 1) = false;
          mask(2, 0) = false;
          return ad::sum(ad::logsumexp_rows_masked(ad::scale(v[0], 3.0), mask));
        }, {A}) < tol);
  const Mat S = random_mat(rng, 6, 2), Wt = random_mat(rng, 6, 2);
  CHECK(check([Wt](ad::Tape& t, auto& v) {
          Var y = ad::segment_softmax(ad::scale(v[0], 4.0), {0, 1, 0, 2, 1, 0}, 4);
          return ad::sum(ad::hadamard(y, t.constant(Wt)));
        }, {S}) < tol);
  CHECK(check([](ad::Tape&, auto& v) {
          Var s = ad::mul_col(v[0], v[1]);
          return ad::sum(ad::hadamard(s, s));
        }, {A, random_mat(rng, 4, 1)}) < tol);
  // Attention primitives, 2 heads of width 2.
  const Mat Q = random_mat(rng, 3, 4), K = random_mat(rng, 5, 4), V = random_mat(rng, 5, 4), Al = random_mat(rng, 6, 2);
  const ad::Index dst = {0, 0, 1, 2, 2, 2}, src = {0, 3, 1, 4, 2, 0};
  const std::vector<double> w = {0.5, 1.0, 0.2, 0.0, 0.9, 1.0};
  CHECK(check([&](ad::Tape&, auto& v) {
          Var s = ad::edge_head_scores(v[0], v[1], dst, src, w, 2, 0.7);
          return ad::sum(ad::hadamard(s, s));
        }, {Q, K}) < tol);
  CHECK(check([&](ad::Tape&, auto& v) {
          Var o = ad::edge_aggregate(v[0], v[1], dst, src, w, 2, 3);
          return ad::sum(ad::hadamard(o, o));
        }, {Al, V}) < tol);
  CHECK(check([&](ad::Tape&, auto& v) {
          Var o = ad::head_mean(v[0], 2);
          return ad::sum(ad::hadamard(o, o));
        }, {Q}) < tol);
}

TEST_CASE("segment softmax sums to one per group and head") {
  Rng rng(2);
  ad::Tape t;
  const ad::Index g = {0, 0, 1, 3, 3, 3, 1};
  Var y = ad::segment_softmax(t.constant(random_mat(rng, 7, 3) * 30.0), g, 4);
  Mat sums = Mat::Zero(4, 3);
  for (std::size_t e = 0; e < g.size(); ++e) sums.row(g[e]) += y.value().row(static_cast<Eigen::Index>(e));
  for (int grp : {0, 1, 3}) {
    for (int h = 0; h < 3; ++h) CHECK(sums(grp, h) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("constants take no gradient") {
  ad::Tape t;
  Var c = t.constant(Mat::Ones(2, 2));
  Var x = t.leaf(Mat::Ones(2, 2));
  Var out = ad::sum(ad::hadamard(c, x));
  t.backward(out);
  CHECK_FALSE(t.has_grad(c));
  CHECK(t.grad(x).sum() == doctest::Approx(4.0));
}
