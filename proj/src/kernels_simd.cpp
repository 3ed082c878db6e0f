// Vectorized kernel variant. This translation unit is compiled with
// -mavx2 -mfma on x86-64 (see src/CMakeLists.txt); on aarch64 the native
// ABI already provides NEON. std::experimental::simd lowers to the widest
// vector width enabled for this TU. Nothing here may run unless the
// dispatcher in kernels.cpp has confirmed CPU support.

#include "nofs/kernels.hpp"

#if defined(__GNUC__) && __has_include(<experimental/simd>)
#define NOFS_HAVE_STD_SIMD 1
#include <experimental/simd>
#else
#define NOFS_HAVE_STD_SIMD 0
#endif

#include <algorithm>
#include <cmath>

namespace nofs::kernels::detail {

#if NOFS_HAVE_STD_SIMD

namespace {

namespace stdx = std::experimental;
using vd = stdx::native_simd<double>;
constexpr std::size_t kLanes = vd::size();

inline vd load(const double* p) {
  vd v;
  v.copy_from(p, stdx::element_aligned);
  return v;
}

double dot_v(const double* a, const double* b, std::size_t n) {
  vd acc = 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc += load(a + i) * load(b + i);
  double s = stdx::reduce(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_v(const double* a, std::size_t n) {
  vd acc = 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc += load(a + i);
  double s = stdx::reduce(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double squared_l2_v(const double* a, std::size_t n) { return dot_v(a, a, n); }

double squared_distance_v(const double* a, const double* b, std::size_t n) {
  vd acc = 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const vd d = load(a + i) - load(b + i);
    acc += d * d;
  }
  double s = stdx::reduce(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double max_abs_v(const double* a, std::size_t n) {
  vd acc = 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    acc = stdx::max(acc, stdx::abs(load(a + i)));
  double m = n >= kLanes ? stdx::hmax(acc) : 0.0;
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

double max_abs_diff_v(const double* a, const double* b, std::size_t n) {
  vd acc = 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    acc = stdx::max(acc, stdx::abs(load(a + i) - load(b + i)));
  double m = n >= kLanes ? stdx::hmax(acc) : 0.0;
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void axpy_v(double alpha, const double* x, double* y, std::size_t n) {
  const vd va = alpha;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vd acc = load(y + i) + va * load(x + i);
    acc.copy_to(y + i, stdx::element_aligned);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void lincomb2_v(double wa, const double* a, double wb, const double* b,
                double* out, std::size_t n) {
  const vd va = wa, vb = wb;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vd acc = va * load(a + i) + vb * load(b + i);
    acc.copy_to(out + i, stdx::element_aligned);
  }
  for (; i < n; ++i) out[i] = wa * a[i] + wb * b[i];
}

void lincomb3_v(double wa, const double* a, double wb, const double* b,
                double wc, const double* c, double* out, std::size_t n) {
  const vd va = wa, vb = wb, vc = wc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vd acc = va * load(a + i) + vb * load(b + i) + vc * load(c + i);
    acc.copy_to(out + i, stdx::element_aligned);
  }
  for (; i < n; ++i) out[i] = wa * a[i] + wb * b[i] + wc * c[i];
}

void clamp_v(const double* a, double lo, double hi, double* out,
             std::size_t n) {
  const vd vlo = lo, vhi = hi;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vd acc = stdx::min(stdx::max(load(a + i), vlo), vhi);
    acc.copy_to(out + i, stdx::element_aligned);
  }
  for (; i < n; ++i) out[i] = std::min(std::max(a[i], lo), hi);
}

const Ops kSimdOps{dot_v,      sum_v,      squared_l2_v, squared_distance_v,
                   max_abs_v,  max_abs_diff_v,           axpy_v,
                   lincomb2_v, lincomb3_v, clamp_v};

}  // namespace

const SimdVariant& simd_variant() {
#if defined(__AVX2__) && defined(__FMA__)
  static const SimdVariant v{&kSimdOps, true};
#else
  static const SimdVariant v{&kSimdOps, false};
#endif
  return v;
}

#else  // !NOFS_HAVE_STD_SIMD

const SimdVariant& simd_variant() {
  static const SimdVariant v{nullptr, false};
  return v;
}

#endif

}  // namespace nofs::kernels::detail
