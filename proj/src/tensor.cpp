#include "graphid/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "graphid/common.hpp"

namespace graphid {

namespace {

#if defined(__AVX512F__) && defined(__GNUC__)
#define GRAPHID_GEMM_TILED 1
// 4×16 register tile: eight named 512-bit accumulators live in registers for
// the whole k loop, so C traffic happens once per tile instead of per k step.
typedef double v8df __attribute__((vector_size(64)));
constexpr uint32_t kMr = 4;
constexpr uint32_t kNr = 16;  // 2 × v8df

inline v8df load8(const double* p) {
  v8df v;
  __builtin_memcpy(&v, p, sizeof v);
  return v;
}
inline void store8(double* p, v8df v) { __builtin_memcpy(p, &v, sizeof v); }
inline void add8(double* p, v8df v) {
  v8df o;
  __builtin_memcpy(&o, p, sizeof o);
  o += v;
  __builtin_memcpy(p, &o, sizeof o);
}
inline v8df bcast8(double x) { return v8df{x, x, x, x, x, x, x, x}; }

// One C tile: rows i0..i0+3, cols j0..j0+15, k in [k0, k1). xs(k, r) supplies
// the A operand. kAcc selects C += tile versus C = tile.
template <bool kAcc, class XS>
inline void tile_4x16(const Tensor& b, Tensor& c, uint32_t i0, uint32_t j0, uint32_t k0,
                      uint32_t k1, XS&& xs) {
  v8df a00 = {}, a01 = {}, a10 = {}, a11 = {};
  v8df a20 = {}, a21 = {}, a30 = {}, a31 = {};
  const double* __restrict__ bp = b.row(k0) + j0;
  const size_t bstride = b.cols;
  for (uint32_t k = k0; k < k1; ++k, bp += bstride) {
    const v8df b0 = load8(bp), b1 = load8(bp + 8);
    v8df x;
    x = bcast8(xs(k, 0));
    a00 += x * b0;
    a01 += x * b1;
    x = bcast8(xs(k, 1));
    a10 += x * b0;
    a11 += x * b1;
    x = bcast8(xs(k, 2));
    a20 += x * b0;
    a21 += x * b1;
    x = bcast8(xs(k, 3));
    a30 += x * b0;
    a31 += x * b1;
  }
  double* c0 = c.row(i0) + j0;
  double* c1 = c.row(i0 + 1) + j0;
  double* c2 = c.row(i0 + 2) + j0;
  double* c3 = c.row(i0 + 3) + j0;
  if constexpr (kAcc) {
    add8(c0, a00);
    add8(c0 + 8, a01);
    add8(c1, a10);
    add8(c1 + 8, a11);
    add8(c2, a20);
    add8(c2 + 8, a21);
    add8(c3, a30);
    add8(c3 + 8, a31);
  } else {
    store8(c0, a00);
    store8(c0 + 8, a01);
    store8(c1, a10);
    store8(c1 + 8, a11);
    store8(c2, a20);
    store8(c2 + 8, a21);
    store8(c3, a30);
    store8(c3 + 8, a31);
  }
}
#else
#define GRAPHID_GEMM_TILED 0
constexpr uint32_t kMr = 1;
constexpr uint32_t kNr = 1;
#endif

// Scalar path for row/column remainders (and non-vector builds); accumulates,
// so the target region must hold valid values.
void axpy_rows_nn(const Tensor& a, const Tensor& b, Tensor& c, uint32_t i0, uint32_t i1,
                  uint32_t j0, uint32_t j1) {
  const uint32_t kk = a.cols;
  for (uint32_t i = i0; i < i1; ++i) {
    const double* __restrict__ ar = a.row(i);
    double* __restrict__ cr = c.row(i);
    for (uint32_t k = 0; k < kk; ++k) {
      const double* __restrict__ br = b.row(k);
      const double x = ar[k];
      for (uint32_t j = j0; j < j1; ++j) cr[j] += x * br[j];
    }
  }
}

void rank1_tn(const Tensor& a, const Tensor& b, Tensor& c, uint32_t i0, uint32_t i1,
              uint32_t j0, uint32_t j1) {
  const uint32_t kk = a.rows;
  for (uint32_t k = 0; k < kk; ++k) {
    const double* __restrict__ ar = a.row(k);
    const double* __restrict__ br = b.row(k);
    for (uint32_t i = i0; i < i1; ++i) {
      double* __restrict__ cr = c.row(i);
      const double x = ar[i];
      for (uint32_t j = j0; j < j1; ++j) cr[j] += x * br[j];
    }
  }
}

// Shared gemm_nn body. kAcc=false stores the tiled interior directly and
// expects the caller to have zeroed only the remainder strips.
template <bool kAcc>
void gemm_nn_body(const Tensor& a, const Tensor& b, Tensor& c) {
  const uint32_t m = a.rows, kk = a.cols, n = b.cols;
  const uint32_t mw = m - m % kMr, nw = n - n % kNr;
#if GRAPHID_GEMM_TILED
  for (uint32_t i0 = 0; i0 < mw; i0 += kMr) {
    const double* __restrict__ a0 = a.row(i0);
    const double* __restrict__ a1 = a.row(i0 + 1);
    const double* __restrict__ a2 = a.row(i0 + 2);
    const double* __restrict__ a3 = a.row(i0 + 3);
    for (uint32_t j0 = 0; j0 < nw; j0 += kNr)
      tile_4x16<kAcc>(b, c, i0, j0, 0, kk, [&](uint32_t k, uint32_t r) {
        return r == 0 ? a0[k] : r == 1 ? a1[k] : r == 2 ? a2[k] : a3[k];
      });
  }
  if (nw < n) axpy_rows_nn(a, b, c, 0, mw, nw, n);
  if (mw < m) axpy_rows_nn(a, b, c, mw, m, 0, n);
#else
  axpy_rows_nn(a, b, c, 0, m, 0, n);
#endif
}

}  // namespace

void gemm_nn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
    throw Error("gemm_nn: shape mismatch");
  gemm_nn_body<true>(a, b, c);
}

// C += Aᵀ·B with the same register tiling; A is walked column-wise
// (broadcast scalars), B row-wise. Used for weight gradients, where A and B
// are tall activation/gradient matrices and C is small.
void gemm_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
    throw Error("gemm_tn: shape mismatch");
  const uint32_t kk = a.rows, m = a.cols, n = b.cols;
  const uint32_t mw = m - m % kMr, nw = n - n % kNr;
#if GRAPHID_GEMM_TILED
  const double* __restrict__ abase = kk ? a.row(0) : nullptr;
  const size_t astride = a.cols;
  // Chunk k so the operand strips being swept stay resident in L2; C is small
  // for this shape and cheap to revisit per chunk.
  constexpr uint32_t kKc = 512;
  for (uint32_t k0 = 0; k0 < kk; k0 += kKc) {
    const uint32_t k1 = std::min(kk, k0 + kKc);
    for (uint32_t i0 = 0; i0 < mw; i0 += kMr)
      for (uint32_t j0 = 0; j0 < nw; j0 += kNr)
        tile_4x16<true>(b, c, i0, j0, k0, k1, [&](uint32_t k, uint32_t r) {
          return abase[size_t(k) * astride + i0 + r];
        });
  }
  if (nw < n) rank1_tn(a, b, c, 0, mw, nw, n);
  if (mw < m) rank1_tn(a, b, c, mw, m, 0, n);
#else
  rank1_tn(a, b, c, 0, m, 0, n);
#endif
}

void gemm_nt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows)
    throw Error("gemm_nt: shape mismatch");
  gemm_nn_acc(a, transpose(b), c);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows) throw Error("matmul: shape mismatch");
  const uint32_t m = a.rows, n = b.cols;
#if GRAPHID_GEMM_TILED
  Tensor c = Tensor::uninit(m, n);
  // The tiled interior is written outright; zero only the remainder strips
  // the scalar accumulate path covers.
  const uint32_t mw = m - m % kMr, nw = n - n % kNr;
  if (nw < n)
    for (uint32_t i = 0; i < mw; ++i) std::fill(c.row(i) + nw, c.row(i) + n, 0.0);
  for (uint32_t i = mw; i < m; ++i) std::fill(c.row(i), c.row(i) + n, 0.0);
  gemm_nn_body<false>(a, b, c);
#else
  Tensor c(m, n);
  gemm_nn_body<true>(a, b, c);
#endif
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t = Tensor::uninit(a.cols, a.rows);
  for (uint32_t i = 0; i < a.rows; ++i) {
    const double* r = a.row(i);
    for (uint32_t j = 0; j < a.cols; ++j) t.at(j, i) = r[j];
  }
  return t;
}

bool all_finite(const Tensor& t) {
  for (const double v : t.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace graphid
