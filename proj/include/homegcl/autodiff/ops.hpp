#pragma once

#include <vector>

#include "homegcl/autodiff/tape.hpp"

namespace homegcl::ad {

using Index = std::vector<int>;

Var matmul(Var a, Var b);     // a b
Var matmul_nt(Var a, Var b);  // a b^T
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var neg(Var a);

// a (n x m) + b (1 x m) on every row.
Var add_row(Var a, Var b);
// a (n x m) * c (1 x m) on every row, c constant.
Var mul_row_const(Var a, const Mat& c);
// a (n x m) * s (n x 1) on every column.
Var mul_col(Var a, Var s);
// Elementwise product with a constant matrix of the same shape.
Var mul_const(Var a, const Mat& c);

Var relu(Var a);
Var elu(Var a, double alpha = 1.0);
Var log_sigmoid(Var a);
Var sigmoid(Var a);

// Rows a[idx[k]] stacked.
Var gather_rows(Var a, const Index& idx);
// out[idx[k]] += a[k]; output has n rows.
Var scatter_add_rows(Var a, const Index& idx, int n);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, int start, int len);
Var slice_rows(Var a, int start, int len);

Var sum(Var a);        // 1 x 1
Var mean(Var a);       // 1 x 1
Var mean_rows(Var a);  // 1 x m column means
Var row_dot(Var a, Var b);  // n x 1
Var diag(Var a);            // n x 1 from a square matrix

// Rows scaled to unit L2 norm; rows with norm below eps are divided by eps.
Var l2_normalize_rows(Var a, double eps = 1e-12);

// log sum_j exp(a_ij) over the entries of row i with mask(i, j) true. Rows
// with no active entry give -infinity.
Var logsumexp_rows_masked(Var a, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask);

// Softmax over the entries that share a group id, separately per column.
// a is E x H, group has E entries in [0, n_groups).
Var segment_softmax(Var a, const Index& group, int n_groups);

// Edge attention logits. q is N x (H*D), k is M x (H*D); for edge e with
// target dst[e], source row src[e] and weight w[e]:
//   out(e, h) = scale * w[e] * <q[dst[e]]_h, k[src[e]]_h>
Var edge_head_scores(Var q, Var k, const Index& dst, const Index& src, const std::vector<double>& w, int heads,
                     double scale);

// Weighted message sum. alpha is E x H, v is M x (H*D):
//   out[dst[e]]_h += alpha(e, h) * w[e] * v[src[e]]_h, out has n_dst rows.
Var edge_aggregate(Var alpha, Var v, const Index& dst, const Index& src, const std::vector<double>& w, int heads,
                   int n_dst);

// Average of the H column blocks of an N x (H*D) matrix.
Var head_mean(Var a, int heads);

}  // namespace homegcl::ad
