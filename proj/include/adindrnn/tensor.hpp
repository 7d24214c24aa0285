// Copyright 2026 The ADIndRNN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "adindrnn/core/error.hpp"

namespace adindrnn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

/// Dense row-major array with an explicit shape.
///
/// A default-constructed tensor is an empty placeholder (no shape, no data).
/// Every other tensor satisfies product(shape) == size() with all extents
/// at least one.
template <typename T = double>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T{0})
      : shape_(std::move(shape)), data_(checked_size(shape_), fill) {}

  Tensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_size(shape_) != data_.size()) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + shape_to_string(shape_));
    }
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), T{1}); }

  static Tensor identity(std::size_t n) {
    Tensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = T{1};
    return t;
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t i, std::size_t j) {
    assert(rank() == 2);
    return data_[i * shape_[1] + j];
  }
  const T& at(std::size_t i, std::size_t j) const {
    assert(rank() == 2);
    return data_[i * shape_[1] + j];
  }
  T& at(std::size_t i, std::size_t j, std::size_t k) {
    assert(rank() == 3);
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  const T& at(std::size_t i, std::size_t j, std::size_t k) const {
    assert(rank() == 3);
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  /// Same data under a new shape of equal element count.
  Tensor reshaped(Shape shape) const {
    return Tensor(std::move(shape), data_);
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](T v) { return static_cast<U>(v); });
    return Tensor<U>(shape_, std::move(out));
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](T v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static std::size_t checked_size(const Shape& shape) {
    for (std::size_t e : shape) {
      if (e == 0) {
        throw DimensionError("tensor extents must be positive, got " +
                             shape_to_string(shape));
      }
    }
    return shape_size(shape);
  }

  Shape shape_;
  std::vector<T> data_;
};

namespace kernels {

// Row-major GEMM variants with a fixed accumulation order. All of them
// accumulate into `c`.

/// c[m x n] += a[m x k] * b[k x n]
template <typename T>
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const T* a,
             const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    const T* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{0}) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

/// c[m x n] += a[m x k] * b[n x k]^T
template <typename T>
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const T* a,
             const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const T* brow = b + j * k;
      T acc{0};
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

/// c[k x n] += a[m x k]^T * b[m x n]
template <typename T>
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const T* a,
             const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    const T* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{0}) continue;
      T* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace kernels

/// Standard matrix product of two rank-2 tensors.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " +
                         shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor<T> c({m, n});
  kernels::gemm_nn(m, k, n, a.data(), b.data(), c.data());
  return c;
}

/// Element-wise product. `b` is either the same shape as `a`, or a rank-1
/// vector whose length equals the last extent of `a`.
template <typename T>
Tensor<T> hadamard(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out = a;
  if (a.shape() == b.shape()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
  }
  if (b.rank() == 1 && a.rank() >= 1 && b.dim(0) == a.shape().back()) {
    const std::size_t f = b.dim(0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i % f];
    return out;
  }
  throw DimensionError("hadamard: incompatible shapes " +
                       shape_to_string(a.shape()) + " and " +
                       shape_to_string(b.shape()));
}

namespace kernels {

/// In-place numerically stable softmax of one row.
template <typename T>
void softmax_row(T* row, std::size_t n) {
  const T mx = *std::max_element(row, row + n);
  T sum{0};
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = std::exp(row[j] - mx);
    sum += row[j];
  }
  for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
}

}  // namespace kernels

/// Softmax applied independently to each row of a rank-2 tensor.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& a) {
  if (a.rank() != 2) {
    throw DimensionError("softmax_rows: expected rank 2, got " +
                         shape_to_string(a.shape()));
  }
  Tensor<T> out = a;
  const std::size_t n = a.dim(1);
  for (std::size_t i = 0; i < a.dim(0); ++i) {
    kernels::softmax_row(out.data() + i * n, n);
  }
  return out;
}

/// Arithmetic mean along `axis`; the axis is removed from the shape. A
/// rank-1 input reduces to a one-element rank-1 tensor.
template <typename T>
Tensor<T> mean_over_axis(const Tensor<T>& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw DimensionError("mean_over_axis: axis " + std::to_string(axis) +
                         " out of range for shape " +
                         shape_to_string(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];

  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out_shape.push_back(s[i]);
  }
  if (out_shape.empty()) out_shape.push_back(1);

  Tensor<T> out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t l = 0; l < len; ++l) {
      const T* src = a.data() + (o * len + l) * inner;
      T* dst = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  const T inv = T{1} / static_cast<T>(len);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
  return out;
}

/// Concatenates rank-3 tensors along the last (feature) axis.
template <typename T>
Tensor<T> concat_features(const std::vector<const Tensor<T>*>& parts) {
  if (parts.empty()) throw DimensionError("concat_features: no inputs");
  const std::size_t n = parts[0]->dim(0), t = parts[0]->dim(1);
  std::size_t width = 0;
  for (const auto* p : parts) {
    if (p->rank() != 3 || p->dim(0) != n || p->dim(1) != t) {
      throw DimensionError("concat_features: mismatched shape " +
                           shape_to_string(p->shape()) + " vs " +
                           shape_to_string(parts[0]->shape()));
    }
    width += p->dim(2);
  }
  Tensor<T> out({n, t, width});
  const std::size_t rows = n * t;
  std::size_t offset = 0;
  for (const auto* p : parts) {
    const std::size_t f = p->dim(2);
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(p->data() + r * f, f, out.data() + r * width + offset);
    }
    offset += f;
  }
  return out;
}

/// Splits the feature axis of `whole` into consecutive slices of `widths`.
template <typename T>
std::vector<Tensor<T>> split_features(const Tensor<T>& whole,
                                      const std::vector<std::size_t>& widths) {
  const std::size_t n = whole.dim(0), t = whole.dim(1), total = whole.dim(2);
  std::vector<Tensor<T>> out;
  std::size_t offset = 0;
  for (std::size_t f : widths) {
    Tensor<T> part({n, t, f});
    for (std::size_t r = 0; r < n * t; ++r) {
      std::copy_n(whole.data() + r * total + offset, f, part.data() + r * f);
    }
    out.push_back(std::move(part));
    offset += f;
  }
  if (offset != total) {
    throw DimensionError("split_features: widths do not sum to " +
                         std::to_string(total));
  }
  return out;
}

/// a += b, same shape required.
template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("add_inplace: shape " + shape_to_string(a.shape()) +
                         " vs " + shape_to_string(b.shape()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace adindrnn
