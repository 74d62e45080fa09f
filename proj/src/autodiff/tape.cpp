#include "homegcl/autodiff/tape.hpp"

#include "homegcl/core/error.hpp"

namespace homegcl::ad {

Var Tape::constant(Mat value) {
  nodes_.push_back(Node{std::move(value), Mat(), false, {}});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::leaf(Mat value) {
  nodes_.push_back(Node{std::move(value), Mat(), true, {}});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Mat& Tape::grad(Var v) {
  auto& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::push(Mat value, std::vector<Var> inputs, std::function<void(const Mat&)> backward) {
  bool rg = false;
  for (const auto& v : inputs) {
    if (v.tape != this) throw Error("autodiff: input from a different tape");
    rg = rg || requires_grad(v);
  }
  nodes_.push_back(Node{std::move(value), Mat(), rg, rg ? std::move(backward) : nullptr});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

void Tape::backward(Var out) {
  if (value(out).size() != 1) throw Error("autodiff: backward needs a scalar output");
  grad(out)(0, 0) += 1.0;
  for (int i = out.id; i >= 0; --i) {
    auto& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(n.grad);
  }
}

}  // namespace homegcl::ad
