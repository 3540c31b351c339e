#ifndef HANDMOTION_NN_TENSOR_HPP_
#define HANDMOTION_NN_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace handmotion::nn {

using Shape = std::vector<std::size_t>;
// Over-aligned so that vectorized reductions take the same path regardless of
// where the allocator placed the buffer; otherwise results vary by address.
using AlignedDoubles = std::vector<double, Eigen::aligned_allocator<double>>;

using MatrixMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatrixMap = Eigen::Map<const Eigen::Matrix<
    double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double> storage() const {
    return std::vector<double>(data_.begin(), data_.end());
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Views a rank-2 tensor (or rank-1 as a single row) as a matrix.
  MatrixMap matrix();
  ConstMatrixMap matrix() const;
  // Views the tensor as rows x (size / rows).
  MatrixMap matrix(std::size_t rows);
  ConstMatrixMap matrix(std::size_t rows) const;

  void fill(double v);
  bool all_finite() const;
  // Throws NumericalError naming `where` if any value is NaN or infinite.
  void check_finite(const std::string& where) const;
  Tensor reshaped(Shape shape) const;

 private:
  Shape shape_;
  AlignedDoubles data_;
};

// Named parameters with same-shaped gradient accumulators, kept in
// insertion order.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
  };

  // Throws UsageError on a duplicate name.
  Tensor& add(const std::string& name, Tensor init);
  bool contains(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace handmotion::nn

#endif  // HANDMOTION_NN_TENSOR_HPP_
