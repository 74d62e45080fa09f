#pragma once

#include <cstdint>
#include <vector>

#include "homegcl/encoder/params.hpp"
#include "homegcl/eval/metrics.hpp"
#include "homegcl/eval/targets.hpp"

namespace homegcl {

struct ProbeConfig {
  int folds = 5;
  std::uint64_t seed = 0;
  double ridge_alpha = 1.0;
  int classifier_steps = 500;
  double classifier_lr = 0.01;
  int od_steps = 500;
  double od_lr = 0.01;
};

// Shuffled fold index per item; fold sizes differ by at most one.
std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

struct ClassifyResult {
  std::vector<ClassificationScores> folds;
  ClassificationScores mean;
};

struct RegressionResult {
  std::vector<RegressionScores> folds;
  RegressionScores mean;
};

// Softmax classifier on standardized embeddings, evaluated per held-out fold.
ClassifyResult classify(const Mat& x, const std::vector<int>& labels, const ProbeConfig& config);

struct RidgeModel {
  Mat weights;  // D x k
  Mat bias;     // 1 x k
};

// Closed-form ridge regression with an unpenalized intercept.
RidgeModel ridge_fit(const Mat& x, const Mat& y, double alpha);
Mat ridge_predict(const RidgeModel& m, const Mat& x);

// Ridge on standardized embeddings; scores average inflow and outflow.
RegressionResult predict_flow(const Mat& x, const FlowTargets& targets, const ProbeConfig& config);

struct BilinearModel {
  Mat W;
  double train_mse = 0.0;
};

// Fits score(i, j) = h_i^T W h_j to `targets` on entries where `mask` is 1,
// starting from W = 0.
BilinearModel fit_bilinear(const Mat& h, const Mat& targets, const Mat& mask, int steps, double lr);
double bilinear_score(const Mat& h_i, const Mat& W, const Mat& h_j);

// Bilinear OD model evaluated on held-out origin-destination pairs.
RegressionResult predict_od(const Mat& h, const Mat& od, const ProbeConfig& config);

}  // namespace homegcl
