#include "homegcl/eval/metrics.hpp"

#include <cmath>
#include <map>
#include <set>

#include "homegcl/core/error.hpp"

namespace homegcl {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw ValidationError("metric inputs differ in length");
  if (a == 0) throw ValidationError("metric inputs are empty");
}

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  double n = 0.0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  check_sizes(a.size(), b.size());
  Contingency c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.joint[{a[i], b[i]}] += 1.0;
    c.rows[a[i]] += 1.0;
    c.cols[b[i]] += 1.0;
  }
  c.n = static_cast<double>(a.size());
  return c;
}

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [k, v] : counts) h -= (v / n) * std::log(v / n);
  return h;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

ClassificationScores f1_scores(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_sizes(truth.size(), pred.size());
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  std::map<int, double> tp, fp, fn;
  double tp_all = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) {
      tp[truth[i]] += 1.0;
      tp_all += 1.0;
    } else {
      fp[pred[i]] += 1.0;
      fn[truth[i]] += 1.0;
    }
  }
  ClassificationScores s;
  // With one label per instance, total FP equals total FN.
  const double n = static_cast<double>(truth.size());
  s.micro_f1 = 2.0 * tp_all / (2.0 * tp_all + 2.0 * (n - tp_all));
  double sum = 0.0;
  for (int c : classes) {
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
  }
  s.macro_f1 = sum / static_cast<double>(classes.size());
  return s;
}

RegressionScores regression_scores(const std::vector<double>& truth, const std::vector<double>& pred) {
  check_sizes(truth.size(), pred.size());
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = pred[i] - truth[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(truth.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

double normalized_mutual_info(const std::vector<int>& a, const std::vector<int>& b) {
  const Contingency c = contingency(a, b);
  const double ha = entropy(c.rows, c.n);
  const double hb = entropy(c.cols, c.n);
  // Both labelings constant: identical partitions.
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, v] : c.joint) {
    mi += (v / c.n) * std::log(v * c.n / (c.rows.at(key.first) * c.cols.at(key.second)));
  }
  return std::max(0.0, mi) / (0.5 * (ha + hb));
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const Contingency c = contingency(a, b);
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [k, v] : c.joint) index += pairs(v);
  for (const auto& [k, v] : c.rows) sum_a += pairs(v);
  for (const auto& [k, v] : c.cols) sum_b += pairs(v);
  if (c.n < 2.0) return 1.0;
  const double expected = sum_a * sum_b / pairs(c.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace homegcl
