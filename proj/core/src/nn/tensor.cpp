#include "handmotion/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "handmotion/errors.hpp"

namespace handmotion::nn {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (data_.size() != shape_size(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string(shape_));
  }
}

MatrixMap Tensor::matrix() {
  if (rank() == 1) return MatrixMap(data_.data(), 1, shape_[0]);
  if (rank() != 2) {
    throw DimensionError("matrix view of rank-" + std::to_string(rank()) +
                         " tensor");
  }
  return MatrixMap(data_.data(), shape_[0], shape_[1]);
}

ConstMatrixMap Tensor::matrix() const {
  if (rank() == 1) return ConstMatrixMap(data_.data(), 1, shape_[0]);
  if (rank() != 2) {
    throw DimensionError("matrix view of rank-" + std::to_string(rank()) +
                         " tensor");
  }
  return ConstMatrixMap(data_.data(), shape_[0], shape_[1]);
}

MatrixMap Tensor::matrix(std::size_t rows) {
  if (rows == 0 || data_.size() % rows != 0) {
    throw DimensionError("cannot view " + shape_string(shape_) + " as " +
                         std::to_string(rows) + " rows");
  }
  return MatrixMap(data_.data(), rows, data_.size() / rows);
}

ConstMatrixMap Tensor::matrix(std::size_t rows) const {
  if (rows == 0 || data_.size() % rows != 0) {
    throw DimensionError("cannot view " + shape_string(shape_) + " as " +
                         std::to_string(rows) + " rows");
  }
  return ConstMatrixMap(data_.data(), rows, data_.size() / rows);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::check_finite(const std::string& where) const {
  if (!all_finite()) {
    throw NumericalError("non-finite value produced by " + where);
  }
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw DimensionError("cannot reshape " + shape_string(shape_) + " to " +
                         shape_string(shape));
  }
  Tensor out = *this;
  out.shape_ = std::move(shape);
  return out;
}

Tensor& ParamStore::add(const std::string& name, Tensor init) {
  if (contains(name)) throw UsageError("duplicate parameter '" + name + "'");
  Tensor grad(init.shape());
  index_[name] = entries_.size();
  entries_.push_back({name, std::move(init), std::move(grad)});
  return entries_.back().value;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

std::size_t ParamStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UsageError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamStore::value(const std::string& name) {
  return entries_[index_of(name)].value;
}
const Tensor& ParamStore::value(const std::string& name) const {
  return entries_[index_of(name)].value;
}
Tensor& ParamStore::grad(const std::string& name) {
  return entries_[index_of(name)].grad;
}
const Tensor& ParamStore::grad(const std::string& name) const {
  return entries_[index_of(name)].grad;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

}  // namespace handmotion::nn
