#include "homegcl/train/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace homegcl {

GradCheckReport grad_check(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config,
                           const StepSample& sample, double h, std::size_t max_entries, double zero_floor) {
  Gradients analytic;
  compute_loss(encoder, params, config, sample, &analytic);
  ParamStore probe = params;
  GradCheckReport report;
  for (const auto& [name, value] : params.values) {
    const auto n = static_cast<std::size_t>(value.size());
    std::vector<std::size_t> entries;
    if (max_entries == 0 || n <= max_entries) {
      for (std::size_t i = 0; i < n; ++i) entries.push_back(i);
    } else {
      for (std::size_t k = 0; k < max_entries; ++k) entries.push_back(k * n / max_entries);
    }
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    Mat& p = probe.at(name);
    for (std::size_t i : entries) {
      const double orig = p.data()[i];
      p.data()[i] = orig + h;
      const double up = compute_loss(encoder, probe, config, sample, nullptr).total;
      p.data()[i] = orig - h;
      const double down = compute_loss(encoder, probe, config, sample, nullptr).total;
      p.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.at(name).data()[i];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    GradCheckGroup g{name, entries.size(), std::sqrt(a2), std::sqrt(n2), 0.0};
    // Below the floor both gradients are round-off around an exact zero.
    const double denom = std::max({g.analytic_norm, g.numeric_norm, zero_floor});
    g.rel_error = std::sqrt(diff2) / denom;
    report.max_rel_error = std::max(report.max_rel_error, g.rel_error);
    report.groups.push_back(g);
  }
  return report;
}

}  // namespace homegcl
