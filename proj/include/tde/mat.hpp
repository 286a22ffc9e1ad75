#pragma once

#include <cassert>
#include <cstring>
#include <vector>

#include "tde/common.hpp"
#include "tde/rng.hpp"

namespace tde {

// Row-major dense matrix. Vectors are 1xN.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<Real> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), Real(0)) {}

  Real* row(int r) { return a.data() + size_t(r) * size_t(cols); }
  const Real* row(int r) const { return a.data() + size_t(r) * size_t(cols); }
  Real& at(int r, int c) { return a[size_t(r) * size_t(cols) + size_t(c)]; }
  Real at(int r, int c) const { return a[size_t(r) * size_t(cols) + size_t(c)]; }
  size_t size() const { return a.size(); }
  bool empty() const { return a.empty(); }

  void zero() { std::memset(a.data(), 0, a.size() * sizeof(Real)); }

  void resize(int r, int c) {
    rows = r;
    cols = c;
    a.assign(size_t(r) * size_t(c), Real(0));
  }

  static Mat randn(int r, int c, Rng& rng, double std) {
    Mat m(r, c);
    for (auto& v : m.a)
      v = Real(rng.normal(0.0, std));
    return m;
  }
};

// Fixed 8-lane reduction. The comb pattern keeps the summation order
// identical everywhere this is called, which the replay/one-shot
// bit-equality contract depends on, while still vectorizing under
// strict FP semantics.
inline Real dot(const Real* x, const Real* y, int n) {
  Real s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 += x[i + 0] * y[i + 0];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
    s4 += x[i + 4] * y[i + 4];
    s5 += x[i + 5] * y[i + 5];
    s6 += x[i + 6] * y[i + 6];
    s7 += x[i + 7] * y[i + 7];
  }
  Real tail = 0;
  for (; i < n; ++i)
    tail += x[i] * y[i];
  return (((s0 + s4) + (s1 + s5)) + ((s2 + s6) + (s3 + s7))) + tail;
}

inline void axpy(Real alpha, const Real* x, Real* y, int n) {
  for (int i = 0; i < n; ++i)
    y[i] += alpha * x[i];
}

inline void scale(Real alpha, Real* x, int n) {
  for (int i = 0; i < n; ++i)
    x[i] *= alpha;
}

// Y = X * W^T + b, with W stored [out x in] so each output taps one row.
inline void linear_rows(const Mat& X, const Mat& W, const Real* b, Mat& Y) {
  assert(X.cols == W.cols);
  Y.resize(X.rows, W.rows);
  for (int r = 0; r < X.rows; ++r) {
    const Real* xr = X.row(r);
    Real* yr = Y.row(r);
    for (int o = 0; o < W.rows; ++o)
      yr[o] = dot(xr, W.row(o), X.cols) + (b ? b[o] : Real(0));
  }
}

} // namespace tde
