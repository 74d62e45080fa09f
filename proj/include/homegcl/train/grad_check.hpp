#pragma once

#include <string>
#include <vector>

#include "homegcl/train/trainer.hpp"

namespace homegcl {

struct GradCheckGroup {
  std::string name;
  std::size_t checked = 0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
  double rel_error = 0.0;  // |a - n| / max(|a|, |n|, zero_floor)
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double max_rel_error = 0.0;
};

// Central differences of the fused loss against the tape gradients for every
// parameter group, on one fixed sample. `max_entries` > 0 limits the checked
// entries per group to an evenly spaced subset. Groups whose gradient norms
// both fall below `zero_floor` are compared in absolute terms.
GradCheckReport grad_check(const HomeEncoder& encoder, const ParamStore& params, const TrainConfig& config,
                           const StepSample& sample, double h = 1e-5, std::size_t max_entries = 0,
                           double zero_floor = 1e-8);

}  // namespace homegcl
