#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace graphid {

namespace detail {

/// std::allocator that leaves value-less construct() as default-init, so
/// resize() on scratch buffers skips the zero fill. Fill constructors and
/// explicit values behave as usual.
template <class T>
struct DefaultInitAlloc : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAlloc<U>;
  };
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    if constexpr (sizeof...(Args) == 0)
      ::new (static_cast<void*>(p)) U;
    else
      ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

}  // namespace detail

/// Dense row-major float64 matrix; vectors are 1×n.
struct Tensor {
  using Storage = std::vector<double, detail::DefaultInitAlloc<double>>;

  uint32_t rows = 0;
  uint32_t cols = 0;
  Storage data;

  Tensor() = default;
  Tensor(uint32_t r, uint32_t c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(uint32_t r, uint32_t c) { return Tensor(r, c); }
  /// Allocates without zero-filling; caller must write every element.
  static Tensor uninit(uint32_t r, uint32_t c) {
    Tensor t;
    t.rows = r;
    t.cols = c;
    t.data.resize(static_cast<size_t>(r) * c);
    return t;
  }
  static Tensor row_vector(const std::vector<double>& v) {
    Tensor t;
    t.rows = 1;
    t.cols = static_cast<uint32_t>(v.size());
    t.data.assign(v.begin(), v.end());
    return t;
  }

  size_t numel() const { return data.size(); }
  double* row(uint32_t i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(uint32_t i) const { return data.data() + static_cast<size_t>(i) * cols; }
  double& at(uint32_t i, uint32_t j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(uint32_t i, uint32_t j) const { return data[static_cast<size_t>(i) * cols + j]; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Tensor&) const = default;
};

/// C += A·B. Shapes: (m×k)·(k×n) += into (m×n).
void gemm_nn_acc(const Tensor& a, const Tensor& b, Tensor& c);
/// C += Aᵀ·B. Shapes: (k×m)ᵀ·(k×n) += into (m×n).
void gemm_tn_acc(const Tensor& a, const Tensor& b, Tensor& c);
/// C += A·Bᵀ. Shapes: (m×k)·(n×k)ᵀ += into (m×n).
void gemm_nt_acc(const Tensor& a, const Tensor& b, Tensor& c);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

bool all_finite(const Tensor& t);

}  // namespace graphid
