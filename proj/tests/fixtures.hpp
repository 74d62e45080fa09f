#pragma once

#include "homegcl/autodiff/tape.hpp"
#include "homegcl/core/rng.hpp"
#include "homegcl/core/synthetic_city.hpp"
#include "homegcl/graph/home_graph.hpp"
#include "model_oracles.hpp"

namespace testutil {

inline homegcl::HomeGraph city_graph(int w, int h, std::uint64_t seed, int pois = -1, int trajectories = -1) {
  homegcl::SynthSpec spec{w, h, 100.0, pois < 0 ? 10 * w * h : pois, trajectories < 0 ? 6 * w * h : trajectories, 5,
                          seed};
  return homegcl::assemble_home_graph(homegcl::generate_synthetic_city(spec), homegcl::GraphConfig{});
}

inline homegcl::ad::Mat random_mat(homegcl::Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  homegcl::ad::Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

inline oracle::Rows rows(const homegcl::ad::Mat& m) {
  oracle::Rows out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return out;
}

}  // namespace testutil
