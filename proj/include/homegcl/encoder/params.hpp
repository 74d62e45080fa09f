#pragma once

#include <map>
#include <string>
#include <vector>

#include "homegcl/autodiff/tape.hpp"
#include "homegcl/core/rng.hpp"

namespace homegcl {

using ad::Mat;

// Named parameter matrices. Trainable tensors live in `values`; fixed data
// derived at initialization (bucket boundaries) lives in `buffers`. Map order
// is the canonical parameter order.
struct ParamStore {
  std::map<std::string, Mat> values;
  std::map<std::string, Mat> buffers;

  const Mat& at(const std::string& name) const;
  Mat& at(const std::string& name);
  bool contains(const std::string& name) const { return values.count(name) != 0; }
  std::vector<std::string> names() const;
  std::size_t parameter_count() const;

  // Uniform(-bound, bound).
  void add_uniform(const std::string& name, int rows, int cols, double bound, Rng& rng);
  void add_zeros(const std::string& name, int rows, int cols);

  friend bool operator==(const ParamStore&, const ParamStore&) = default;
};

using Gradients = std::map<std::string, Mat>;

// Binds parameters to tape nodes on first use. With trainable=false they
// enter the tape as constants and no gradients are tracked.
class Bindings {
 public:
  Bindings(ad::Tape& tape, const ParamStore& store, bool trainable)
      : tape_(&tape), store_(&store), trainable_(trainable) {}

  ad::Var operator()(const std::string& name);
  const Mat& buffer(const std::string& name) const;
  ad::Tape& tape() { return *tape_; }
  bool trainable() const { return trainable_; }

  // Gradient per stored parameter after tape.backward(); zero when unused.
  Gradients gradients() const;

 private:
  ad::Tape* tape_;
  const ParamStore* store_;
  bool trainable_;
  std::map<std::string, ad::Var> bound_;
};

}  // namespace homegcl
