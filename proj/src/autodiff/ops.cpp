#include "homegcl/autodiff/ops.hpp"

#include <cmath>
#include <limits>

#include "homegcl/core/error.hpp"

namespace homegcl::ad {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(std::string("autodiff shape mismatch: ") + what);
}

// Accumulate into the input's gradient when it takes one.
template <typename Expr>
void acc(Var v, const Expr& g) {
  if (v.tape->requires_grad(v)) v.tape->grad(v) += g;
}

Tape& tape_of(Var a) { return *a.tape; }

}  // namespace

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul");
  Mat out = a.value() * b.value();
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g * b.value().transpose());
    acc(b, a.value().transpose() * g);
  });
}

Var matmul_nt(Var a, Var b) {
  require(a.cols() == b.cols(), "matmul_nt");
  Mat out = a.value() * b.value().transpose();
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g * b.value());
    acc(b, g.transpose() * a.value());
  });
}

Var transpose(Var a) {
  Mat out = a.value().transpose();
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) { acc(a, g.transpose()); });
}

Var add(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Mat out = a.value() + b.value();
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g);
    acc(b, g);
  });
}

Var sub(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub");
  Mat out = a.value() - b.value();
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g);
    acc(b, -g);
  });
}

Var hadamard(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "hadamard");
  Mat out = a.value().cwiseProduct(b.value());
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g.cwiseProduct(b.value()));
    acc(b, g.cwiseProduct(a.value()));
  });
}

Var scale(Var a, double s) {
  Mat out = a.value() * s;
  return tape_of(a).push(std::move(out), {a}, [a, s](const Mat& g) { acc(a, g * s); });
}

Var add_scalar(Var a, double s) {
  Mat out = a.value().array() + s;
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) { acc(a, g); });
}

Var neg(Var a) { return scale(a, -1.0); }

Var add_row(Var a, Var b) {
  require(b.rows() == 1 && b.cols() == a.cols(), "add_row");
  Mat out = a.value().rowwise() + b.value().row(0);
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, g);
    acc(b, g.colwise().sum());
  });
}

Var mul_row_const(Var a, const Mat& c) {
  require(c.rows() == 1 && c.cols() == a.cols(), "mul_row_const");
  Mat out = a.value().array().rowwise() * c.row(0).array();
  return tape_of(a).push(std::move(out), {a}, [a, c](const Mat& g) {
    acc(a, Mat(g.array().rowwise() * c.row(0).array()));
  });
}

Var mul_col(Var a, Var s) {
  require(s.cols() == 1 && s.rows() == a.rows(), "mul_col");
  Mat out = a.value().array().colwise() * s.value().col(0).array();
  return tape_of(a).push(std::move(out), {a, s}, [a, s](const Mat& g) {
    acc(a, Mat(g.array().colwise() * s.value().col(0).array()));
    acc(s, Mat(g.cwiseProduct(a.value()).rowwise().sum()));
  });
}

Var mul_const(Var a, const Mat& c) {
  require(c.rows() == a.rows() && c.cols() == a.cols(), "mul_const");
  Mat out = a.value().cwiseProduct(c);
  return tape_of(a).push(std::move(out), {a}, [a, c](const Mat& g) { acc(a, g.cwiseProduct(c)); });
}

Var relu(Var a) {
  Mat out = a.value().cwiseMax(0.0);
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) {
    acc(a, Mat((a.value().array() > 0.0).select(g, 0.0)));
  });
}

Var elu(Var a, double alpha) {
  Mat out = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); });
  return tape_of(a).push(std::move(out), {a}, [a, alpha](const Mat& g) {
    Mat d = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? 1.0 : alpha * std::exp(x); });
    acc(a, g.cwiseProduct(d));
  });
}

namespace {

double stable_log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var log_sigmoid(Var a) {
  Mat out = a.value().unaryExpr(&stable_log_sigmoid);
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) {
    // d/dx log sigmoid(x) = sigmoid(-x)
    acc(a, g.cwiseProduct(a.value().unaryExpr([](double x) { return stable_sigmoid(-x); })));
  });
}

Var sigmoid(Var a) {
  Mat out = a.value().unaryExpr(&stable_sigmoid);
  const Var y{a.tape, static_cast<int>(a.tape->size())};
  return tape_of(a).push(std::move(out), {a}, [a, y](const Mat& g) {
    acc(a, Mat(g.array() * y.value().array() * (1.0 - y.value().array())));
  });
}

Var gather_rows(Var a, const Index& idx) {
  const Eigen::Index m = a.cols();
  Mat out(static_cast<Eigen::Index>(idx.size()), m);
  const Mat& av = a.value();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 0 && idx[k] < av.rows(), "gather_rows index");
    out.row(static_cast<Eigen::Index>(k)) = av.row(idx[k]);
  }
  return tape_of(a).push(std::move(out), {a}, [a, idx](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    Mat& ga = a.tape->grad(a);
    for (std::size_t k = 0; k < idx.size(); ++k) ga.row(idx[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

Var scatter_add_rows(Var a, const Index& idx, int n) {
  require(static_cast<Eigen::Index>(idx.size()) == a.rows(), "scatter_add_rows");
  Mat out = Mat::Zero(n, a.cols());
  const Mat& av = a.value();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 0 && idx[k] < n, "scatter_add_rows index");
    out.row(idx[k]) += av.row(static_cast<Eigen::Index>(k));
  }
  return tape_of(a).push(std::move(out), {a}, [a, idx](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    Mat& ga = a.tape->grad(a);
    for (std::size_t k = 0; k < idx.size(); ++k) ga.row(static_cast<Eigen::Index>(k)) += g.row(idx[k]);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols of nothing");
  const Eigen::Index n = parts[0].rows();
  Eigen::Index m = 0;
  for (const auto& p : parts) {
    require(p.rows() == n, "concat_cols rows");
    m += p.cols();
  }
  Mat out(n, m);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return tape_of(parts[0]).push(std::move(out), parts, [parts](const Mat& g) {
    Eigen::Index o = 0;
    for (const auto& p : parts) {
      acc(p, g.middleCols(o, p.cols()));
      o += p.cols();
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows of nothing");
  const Eigen::Index m = parts[0].cols();
  Eigen::Index n = 0;
  for (const auto& p : parts) {
    require(p.cols() == m, "concat_rows cols");
    n += p.rows();
  }
  Mat out(n, m);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return tape_of(parts[0]).push(std::move(out), parts, [parts](const Mat& g) {
    Eigen::Index o = 0;
    for (const auto& p : parts) {
      acc(p, g.middleRows(o, p.rows()));
      o += p.rows();
    }
  });
}

Var slice_cols(Var a, int start, int len) {
  require(start >= 0 && len >= 0 && start + len <= a.cols(), "slice_cols");
  Mat out = a.value().middleCols(start, len);
  return tape_of(a).push(std::move(out), {a}, [a, start, len](const Mat& g) {
    if (a.tape->requires_grad(a)) a.tape->grad(a).middleCols(start, len) += g;
  });
}

Var slice_rows(Var a, int start, int len) {
  require(start >= 0 && len >= 0 && start + len <= a.rows(), "slice_rows");
  Mat out = a.value().middleRows(start, len);
  return tape_of(a).push(std::move(out), {a}, [a, start, len](const Mat& g) {
    if (a.tape->requires_grad(a)) a.tape->grad(a).middleRows(start, len) += g;
  });
}

Var sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) {
    if (a.tape->requires_grad(a)) a.tape->grad(a).array() += g(0, 0);
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  require(n > 0, "mean of empty matrix");
  return scale(sum(a), 1.0 / n);
}

Var mean_rows(Var a) {
  require(a.rows() > 0, "mean_rows of empty matrix");
  const double n = static_cast<double>(a.rows());
  Mat out = a.value().colwise().mean();
  return tape_of(a).push(std::move(out), {a}, [a, n](const Mat& g) {
    if (a.tape->requires_grad(a)) a.tape->grad(a).rowwise() += g.row(0) / n;
  });
}

Var row_dot(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "row_dot");
  Mat out = a.value().cwiseProduct(b.value()).rowwise().sum();
  return tape_of(a).push(std::move(out), {a, b}, [a, b](const Mat& g) {
    acc(a, Mat(b.value().array().colwise() * g.col(0).array()));
    acc(b, Mat(a.value().array().colwise() * g.col(0).array()));
  });
}

Var diag(Var a) {
  require(a.rows() == a.cols(), "diag of non-square");
  Mat out = a.value().diagonal();
  return tape_of(a).push(std::move(out), {a}, [a](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    Mat& ga = a.tape->grad(a);
    for (Eigen::Index i = 0; i < ga.rows(); ++i) ga(i, i) += g(i, 0);
  });
}

Var l2_normalize_rows(Var a, double eps) {
  const Mat& av = a.value();
  Eigen::VectorXd norms = av.rowwise().norm();
  Eigen::VectorXd denom = norms.cwiseMax(eps);
  Mat out = av.array().colwise() / denom.array();
  const Var yv{a.tape, static_cast<int>(a.tape->size())};
  return tape_of(a).push(std::move(out), {a}, [a, yv, norms, eps](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    const Mat& y = yv.value();
    Mat& ga = a.tape->grad(a);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (norms(i) > eps) {
        // d(x/|x|) = (g - y <y, g>) / |x|
        const double yg = y.row(i).dot(g.row(i));
        ga.row(i) += (g.row(i) - yg * y.row(i)) / norms(i);
      } else {
        ga.row(i) += g.row(i) / eps;
      }
    }
  });
}

Var logsumexp_rows_masked(Var a, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask) {
  require(mask.rows() == a.rows() && mask.cols() == a.cols(), "logsumexp mask");
  const Mat& av = a.value();
  const Eigen::Index n = av.rows();
  Mat out(n, 1);
  Mat soft = Mat::Zero(av.rows(), av.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < av.cols(); ++j) {
      if (mask(i, j)) mx = std::max(mx, av(i, j));
    }
    if (!std::isfinite(mx)) {
      out(i, 0) = -std::numeric_limits<double>::infinity();
      continue;
    }
    double s = 0.0;
    for (Eigen::Index j = 0; j < av.cols(); ++j) {
      if (mask(i, j)) {
        soft(i, j) = std::exp(av(i, j) - mx);
        s += soft(i, j);
      }
    }
    soft.row(i) /= s;
    out(i, 0) = mx + std::log(s);
  }
  return tape_of(a).push(std::move(out), {a}, [a, soft](const Mat& g) {
    acc(a, Mat(soft.array().colwise() * g.col(0).array()));
  });
}

Var segment_softmax(Var a, const Index& group, int n_groups) {
  require(static_cast<Eigen::Index>(group.size()) == a.rows(), "segment_softmax");
  const Mat& av = a.value();
  const Eigen::Index H = av.cols();
  Mat mx = Mat::Constant(n_groups, H, -std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < group.size(); ++e) {
    require(group[e] >= 0 && group[e] < n_groups, "segment_softmax group");
    mx.row(group[e]) = mx.row(group[e]).cwiseMax(av.row(static_cast<Eigen::Index>(e)));
  }
  Mat out(av.rows(), H);
  Mat denom = Mat::Zero(n_groups, H);
  for (std::size_t e = 0; e < group.size(); ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    out.row(ei) = (av.row(ei) - mx.row(group[e])).array().exp();
    denom.row(group[e]) += out.row(ei);
  }
  for (std::size_t e = 0; e < group.size(); ++e) {
    out.row(static_cast<Eigen::Index>(e)).array() /= denom.row(group[e]).array();
  }
  const Var yv{a.tape, static_cast<int>(a.tape->size())};
  return tape_of(a).push(std::move(out), {a}, [a, yv, group, n_groups](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    const Mat& y = yv.value();
    // dx_e = y_e (g_e - sum_{e' in group} y_e' g_e')
    Mat dots = Mat::Zero(n_groups, y.cols());
    for (std::size_t e = 0; e < group.size(); ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      dots.row(group[e]) += y.row(ei).cwiseProduct(g.row(ei));
    }
    Mat& ga = a.tape->grad(a);
    for (std::size_t e = 0; e < group.size(); ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      ga.row(ei) += y.row(ei).cwiseProduct(g.row(ei) - dots.row(group[e]));
    }
  });
}

Var edge_head_scores(Var q, Var k, const Index& dst, const Index& src, const std::vector<double>& w, int heads,
                     double scale) {
  require(q.cols() == k.cols() && q.cols() % heads == 0, "edge_head_scores widths");
  require(dst.size() == src.size() && w.size() == src.size(), "edge_head_scores edges");
  const Eigen::Index D = q.cols() / heads;
  const Mat& qv = q.value();
  const Mat& kv = k.value();
  const auto E = static_cast<Eigen::Index>(src.size());
  Mat out(E, heads);
  for (Eigen::Index e = 0; e < E; ++e) {
    require(dst[e] >= 0 && dst[e] < qv.rows() && src[e] >= 0 && src[e] < kv.rows(), "edge_head_scores index");
    const double c = scale * w[e];
    for (int h = 0; h < heads; ++h) {
      out(e, h) = c * qv.row(dst[e]).segment(h * D, D).dot(kv.row(src[e]).segment(h * D, D));
    }
  }
  return tape_of(q).push(std::move(out), {q, k}, [q, k, dst, src, w, heads, scale, D](const Mat& g) {
    const bool gq = q.tape->requires_grad(q);
    const bool gk = k.tape->requires_grad(k);
    Mat* dq = gq ? &q.tape->grad(q) : nullptr;
    Mat* dk = gk ? &k.tape->grad(k) : nullptr;
    const Mat& qv = q.value();
    const Mat& kv = k.value();
    for (std::size_t e = 0; e < src.size(); ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      const double c = scale * w[e];
      if (c == 0.0) continue;
      for (int h = 0; h < heads; ++h) {
        const double ge = c * g(ei, h);
        if (gq) dq->row(dst[e]).segment(h * D, D) += ge * kv.row(src[e]).segment(h * D, D);
        if (gk) dk->row(src[e]).segment(h * D, D) += ge * qv.row(dst[e]).segment(h * D, D);
      }
    }
  });
}

Var edge_aggregate(Var alpha, Var v, const Index& dst, const Index& src, const std::vector<double>& w, int heads,
                   int n_dst) {
  require(v.cols() % heads == 0 && alpha.cols() == heads, "edge_aggregate widths");
  require(alpha.rows() == static_cast<Eigen::Index>(src.size()) && dst.size() == src.size() && w.size() == src.size(),
          "edge_aggregate edges");
  const Eigen::Index D = v.cols() / heads;
  const Mat& av = alpha.value();
  const Mat& vv = v.value();
  Mat out = Mat::Zero(n_dst, v.cols());
  for (std::size_t e = 0; e < src.size(); ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    require(dst[e] >= 0 && dst[e] < n_dst && src[e] >= 0 && src[e] < vv.rows(), "edge_aggregate index");
    if (w[e] == 0.0) continue;
    for (int h = 0; h < heads; ++h) {
      out.row(dst[e]).segment(h * D, D) += (av(ei, h) * w[e]) * vv.row(src[e]).segment(h * D, D);
    }
  }
  return tape_of(alpha).push(std::move(out), {alpha, v}, [alpha, v, dst, src, w, heads, D](const Mat& g) {
    const bool ga = alpha.tape->requires_grad(alpha);
    const bool gv = v.tape->requires_grad(v);
    Mat* da = ga ? &alpha.tape->grad(alpha) : nullptr;
    Mat* dv = gv ? &v.tape->grad(v) : nullptr;
    const Mat& av = alpha.value();
    const Mat& vv = v.value();
    for (std::size_t e = 0; e < src.size(); ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      if (w[e] == 0.0) continue;
      for (int h = 0; h < heads; ++h) {
        const auto gseg = g.row(dst[e]).segment(h * D, D);
        if (ga) (*da)(ei, h) += w[e] * gseg.dot(vv.row(src[e]).segment(h * D, D));
        if (gv) dv->row(src[e]).segment(h * D, D) += (av(ei, h) * w[e]) * gseg;
      }
    }
  });
}

Var head_mean(Var a, int heads) {
  require(a.cols() % heads == 0, "head_mean width");
  const Eigen::Index D = a.cols() / heads;
  Mat out = Mat::Zero(a.rows(), D);
  for (int h = 0; h < heads; ++h) out += a.value().middleCols(h * D, D);
  out /= static_cast<double>(heads);
  return tape_of(a).push(std::move(out), {a}, [a, heads, D](const Mat& g) {
    if (!a.tape->requires_grad(a)) return;
    Mat& ga = a.tape->grad(a);
    for (int h = 0; h < heads; ++h) ga.middleCols(h * D, D) += g / static_cast<double>(heads);
  });
}

}  // namespace homegcl::ad
