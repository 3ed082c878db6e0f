#include "nofs/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace nofs::kernels {

namespace detail {
namespace {

double dot_s(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_s(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double squared_l2_s(const double* a, std::size_t n) { return dot_s(a, a, n); }

double squared_distance_s(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double max_abs_s(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

double max_abs_diff_s(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void axpy_s(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void lincomb2_s(double wa, const double* a, double wb, const double* b,
                double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wa * a[i] + wb * b[i];
}

void lincomb3_s(double wa, const double* a, double wb, const double* b,
                double wc, const double* c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = wa * a[i] + wb * b[i] + wc * c[i];
}

void clamp_s(const double* a, double lo, double hi, double* out,
             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(a[i], lo), hi);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{dot_s,      sum_s,          squared_l2_s,
                       squared_distance_s, max_abs_s,      max_abs_diff_s,
                       axpy_s,     lincomb2_s,     lincomb3_s,
                       clamp_s};
  return ops;
}

}  // namespace detail

namespace {

const detail::Ops* resolve_simd() {
  const detail::SimdVariant& v = detail::simd_variant();
  if (v.ops == nullptr) return nullptr;
#if defined(__x86_64__) || defined(_M_X64)
  if (v.needs_avx2 &&
      !(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")))
    return nullptr;
#endif
  return v.ops;
}

std::atomic<const detail::Ops*> g_active{nullptr};

const detail::Ops& active() {
  const detail::Ops* p = g_active.load(std::memory_order_acquire);
  if (p == nullptr) {
    p = resolve_simd();
    if (p == nullptr) p = &detail::scalar_ops();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

}  // namespace

Backend active_backend() {
  return &active() == &detail::scalar_ops() ? Backend::Scalar : Backend::Simd;
}

bool simd_available() { return resolve_simd() != nullptr; }

void force_backend(Backend b) {
  if (b == Backend::Scalar) {
    g_active.store(&detail::scalar_ops(), std::memory_order_release);
    return;
  }
  const detail::Ops* p = resolve_simd();
  if (p == nullptr)
    throw std::runtime_error("vector kernel backend not supported on this CPU");
  g_active.store(p, std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
double sum(const double* a, std::size_t n) { return active().sum(a, n); }
double squared_l2(const double* a, std::size_t n) {
  return active().squared_l2(a, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) {
  return active().squared_distance(a, b, n);
}
double max_abs(const double* a, std::size_t n) {
  return active().max_abs(a, n);
}
double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return active().max_abs_diff(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
void lincomb2(double wa, const double* a, double wb, const double* b,
              double* out, std::size_t n) {
  active().lincomb2(wa, a, wb, b, out, n);
}
void lincomb3(double wa, const double* a, double wb, const double* b,
              double wc, const double* c, double* out, std::size_t n) {
  active().lincomb3(wa, a, wb, b, wc, c, out, n);
}
void clamp(const double* a, double lo, double hi, double* out, std::size_t n) {
  active().clamp(a, lo, hi, out, n);
}

}  // namespace nofs::kernels
