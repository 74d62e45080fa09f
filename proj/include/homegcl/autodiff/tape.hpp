#pragma once

#include <deque>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace homegcl::ad {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tape;

// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Mat& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

// Reverse-mode tape over dense row-major matrices. Nodes are appended during
// the forward pass; backward() walks them in reverse, calling each node's
// closure to push its gradient to its inputs.
class Tape {
 public:
  Var constant(Mat value);
  Var leaf(Mat value);  // requires gradient

  bool requires_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].requires_grad; }
  const Mat& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }

  // Gradient buffer; zero-initialized on first access.
  Mat& grad(Var v);
  bool has_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].grad.size() != 0; }

  // Appends a node. `backward` receives the output gradient and may be empty
  // when no input requires a gradient.
  Var push(Mat value, std::vector<Var> inputs, std::function<void(const Mat&)> backward);

  // Seeds d(out)/d(out) = 1 for a 1x1 output and propagates.
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::function<void(const Mat&)> backward;
  };
  std::deque<Node> nodes_;
};

inline const Mat& Var::value() const { return tape->value(*this); }

}  // namespace homegcl::ad
