#pragma once

#include <vector>

namespace homegcl {

struct ClassificationScores {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

// F1 over the union of classes seen in `truth` and `pred`.
ClassificationScores f1_scores(const std::vector<int>& truth, const std::vector<int>& pred);

struct RegressionScores {
  double mae = 0.0;
  double rmse = 0.0;
};

RegressionScores regression_scores(const std::vector<double>& truth, const std::vector<double>& pred);

// Normalized mutual information with arithmetic-mean normalization.
double normalized_mutual_info(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace homegcl
