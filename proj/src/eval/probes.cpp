#include "homegcl/eval/probes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "homegcl/core/error.hpp"
#include "homegcl/train/adam.hpp"

namespace homegcl {

namespace {

Mat select_rows(const Mat& m, const std::vector<int>& rows) {
  Mat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  explicit Standardizer(const Mat& x) {
    mean = x.colwise().mean();
    const Mat centered = x.rowwise() - mean;
    scale = (centered.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
      if (scale(j) < 1e-12) scale(j) = 1.0;
    }
  }

  Mat apply(const Mat& x) const { return (x.rowwise() - mean).array().rowwise() / scale.array(); }
};

void split_fold(const std::vector<int>& fold, int k, std::vector<int>& train, std::vector<int>& test) {
  train.clear();
  test.clear();
  for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == k ? test : train).push_back(static_cast<int>(i));
}

void check_folds(int n, int folds) {
  if (folds < 2) throw ValidationError("at least two folds are required");
  if (n < folds) throw ValidationError("fewer items than folds");
}

RegressionScores mean_of(const std::vector<RegressionScores>& v) {
  RegressionScores m;
  for (const auto& s : v) {
    m.mae += s.mae;
    m.rmse += s.rmse;
  }
  m.mae /= static_cast<double>(v.size());
  m.rmse /= static_cast<double>(v.size());
  return m;
}

std::vector<double> column(const Mat& m, int c) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, c);
  return out;
}

// Multinomial logistic regression trained with Adam on the full batch.
Mat softmax_fit(const Mat& x, const std::vector<int>& y, int n_classes, int steps, double lr) {
  const Eigen::Index n = x.rows();
  Mat xa(n, x.cols() + 1);
  xa << x, Mat::Ones(n, 1);
  Mat onehot = Mat::Zero(n, n_classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, y[static_cast<std::size_t>(i)]) = 1.0;
  ParamStore p;
  p.add_zeros("W", static_cast<int>(xa.cols()), n_classes);
  AdamState state;
  AdamConfig cfg;
  cfg.lr = lr;
  for (int s = 0; s < steps; ++s) {
    Mat logits = xa * p.at("W");
    logits = logits.colwise() - logits.rowwise().maxCoeff();
    Mat prob = logits.array().exp();
    prob = prob.array().colwise() / prob.rowwise().sum().array();
    Gradients g;
    g["W"] = xa.transpose() * (prob - onehot) / static_cast<double>(n);
    adam_step(p, g, state, cfg);
  }
  return p.at("W");
}

std::vector<int> softmax_predict(const Mat& W, const Mat& x) {
  Mat xa(x.rows(), x.cols() + 1);
  xa << x, Mat::Ones(x.rows(), 1);
  const Mat logits = xa * W;
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> perm = rng.permutation(n);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % folds;
  return fold;
}

ClassifyResult classify(const Mat& x, const std::vector<int>& labels, const ProbeConfig& config) {
  const int n = static_cast<int>(x.rows());
  if (labels.size() != static_cast<std::size_t>(n)) throw ValidationError("label count does not match embeddings");
  check_folds(n, config.folds);
  std::map<int, int> index;
  for (int l : labels) index.emplace(l, 0);
  if (index.size() < 2) throw ValidationError("classification needs at least two classes");
  int next = 0;
  for (auto& [label, idx] : index) idx = next++;
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = index.at(labels[i]);

  const std::vector<int> fold = fold_assignment(n, config.folds, config.seed);
  ClassifyResult r;
  std::vector<int> train, test;
  for (int k = 0; k < config.folds; ++k) {
    split_fold(fold, k, train, test);
    const Standardizer st(select_rows(x, train));
    std::vector<int> y_train, y_test;
    for (int i : train) y_train.push_back(y[static_cast<std::size_t>(i)]);
    for (int i : test) y_test.push_back(y[static_cast<std::size_t>(i)]);
    const Mat W = softmax_fit(st.apply(select_rows(x, train)), y_train, next, config.classifier_steps,
                              config.classifier_lr);
    r.folds.push_back(f1_scores(y_test, softmax_predict(W, st.apply(select_rows(x, test)))));
  }
  for (const auto& s : r.folds) {
    r.mean.micro_f1 += s.micro_f1 / static_cast<double>(r.folds.size());
    r.mean.macro_f1 += s.macro_f1 / static_cast<double>(r.folds.size());
  }
  return r;
}

RidgeModel ridge_fit(const Mat& x, const Mat& y, double alpha) {
  if (x.rows() != y.rows() || x.rows() == 0) throw ValidationError("ridge inputs differ in length or are empty");
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Mat xc = x.rowwise() - x_mean;
  const Mat yc = y.rowwise() - y_mean;
  Mat gram = xc.transpose() * xc;
  gram.diagonal().array() += alpha;
  RidgeModel m;
  m.weights = gram.ldlt().solve(xc.transpose() * yc);
  m.bias = y_mean - x_mean * m.weights;
  return m;
}

Mat ridge_predict(const RidgeModel& m, const Mat& x) { return (x * m.weights).rowwise() + Eigen::RowVectorXd(m.bias.row(0)); }

RegressionResult predict_flow(const Mat& x, const FlowTargets& targets, const ProbeConfig& config) {
  const int n = static_cast<int>(x.rows());
  if (targets.inflow.size() != static_cast<std::size_t>(n)) throw ValidationError("flow target count does not match embeddings");
  check_folds(n, config.folds);
  Mat y(n, 2);
  for (int i = 0; i < n; ++i) {
    y(i, 0) = targets.inflow[static_cast<std::size_t>(i)];
    y(i, 1) = targets.outflow[static_cast<std::size_t>(i)];
  }
  const std::vector<int> fold = fold_assignment(n, config.folds, config.seed);
  RegressionResult r;
  std::vector<int> train, test;
  for (int k = 0; k < config.folds; ++k) {
    split_fold(fold, k, train, test);
    const Standardizer st(select_rows(x, train));
    const RidgeModel m = ridge_fit(st.apply(select_rows(x, train)), select_rows(y, train), config.ridge_alpha);
    const Mat pred = ridge_predict(m, st.apply(select_rows(x, test)));
    const Mat truth = select_rows(y, test);
    const RegressionScores in = regression_scores(column(truth, 0), column(pred, 0));
    const RegressionScores out = regression_scores(column(truth, 1), column(pred, 1));
    r.folds.push_back({0.5 * (in.mae + out.mae), 0.5 * (in.rmse + out.rmse)});
  }
  r.mean = mean_of(r.folds);
  return r;
}

BilinearModel fit_bilinear(const Mat& h, const Mat& targets, const Mat& mask, int steps, double lr) {
  const double count = mask.sum();
  if (count <= 0.0) throw ValidationError("bilinear fit has no training pairs");
  ParamStore p;
  p.add_zeros("W", static_cast<int>(h.cols()), static_cast<int>(h.cols()));
  AdamState state;
  AdamConfig cfg;
  cfg.lr = lr;
  auto residual = [&]() -> Mat { return (h * p.at("W") * h.transpose() - targets).cwiseProduct(mask); };
  for (int s = 0; s < steps; ++s) {
    const Mat res = residual();
    Gradients g;
    g["W"] = 2.0 / count * h.transpose() * res * h;
    adam_step(p, g, state, cfg);
  }
  BilinearModel m;
  m.W = p.at("W");
  m.train_mse = residual().squaredNorm() / count;
  return m;
}

double bilinear_score(const Mat& h_i, const Mat& W, const Mat& h_j) { return (h_i * W * h_j.transpose())(0, 0); }

RegressionResult predict_od(const Mat& h, const Mat& od, const ProbeConfig& config) {
  const int n = static_cast<int>(h.rows());
  if (od.rows() != n || od.cols() != n) throw ValidationError("OD matrix does not match embeddings");
  if (od.sum() <= 0.0) throw ValidationError("OD matrix is empty");
  check_folds(n * n, config.folds);
  const std::vector<int> fold = fold_assignment(n * n, config.folds, config.seed);
  RegressionResult r;
  for (int k = 0; k < config.folds; ++k) {
    Mat mask = Mat::Zero(n, n);
    for (int i = 0; i < n * n; ++i) {
      if (fold[static_cast<std::size_t>(i)] != k) mask(i / n, i % n) = 1.0;
    }
    const BilinearModel m = fit_bilinear(h, od, mask, config.od_steps, config.od_lr);
    const Mat scores = h * m.W * h.transpose();
    std::vector<double> truth, pred;
    for (int i = 0; i < n * n; ++i) {
      if (fold[static_cast<std::size_t>(i)] != k) continue;
      truth.push_back(od(i / n, i % n));
      pred.push_back(scores(i / n, i % n));
    }
    r.folds.push_back(regression_scores(truth, pred));
  }
  r.mean = mean_of(r.folds);
  return r;
}

}  // namespace homegcl
