#include "homegcl/encoder/params.hpp"

#include "homegcl/core/error.hpp"

namespace homegcl {

const Mat& ParamStore::at(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) throw Error("unknown parameter " + name);
  return it->second;
}

Mat& ParamStore::at(const std::string& name) {
  const auto it = values.find(name);
  if (it == values.end()) throw Error("unknown parameter " + name);
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values) out.push_back(k);
  return out;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [k, v] : values) n += static_cast<std::size_t>(v.size());
  return n;
}

void ParamStore::add_uniform(const std::string& name, int rows, int cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  values[name] = std::move(m);
}

void ParamStore::add_zeros(const std::string& name, int rows, int cols) { values[name] = Mat::Zero(rows, cols); }

ad::Var Bindings::operator()(const std::string& name) {
  const auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const Mat& m = store_->at(name);
  const ad::Var v = trainable_ ? tape_->leaf(m) : tape_->constant(m);
  bound_.emplace(name, v);
  return v;
}

const Mat& Bindings::buffer(const std::string& name) const {
  const auto it = store_->buffers.find(name);
  if (it == store_->buffers.end()) throw Error("unknown buffer " + name);
  return it->second;
}

Gradients Bindings::gradients() const {
  Gradients out;
  for (const auto& [name, m] : store_->values) {
    const auto it = bound_.find(name);
    if (it != bound_.end() && tape_->has_grad(it->second)) {
      out[name] = tape_->grad(const_cast<ad::Var&>(it->second));
    } else {
      out[name] = Mat::Zero(m.rows(), m.cols());
    }
  }
  return out;
}

}  // namespace homegcl
