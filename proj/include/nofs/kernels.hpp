#pragma once

#include <cstddef>

namespace nofs::kernels {

// Contiguous-array arithmetic kernels used by the hot loops (pairwise
// distances, reductions, elementwise block updates). A scalar reference
// implementation and a vectorized variant live in separate translation
// units; the vectorized one is compiled with AVX2/FMA on x86-64 (NEON is
// the baseline on aarch64) and is selected at runtime only when the CPU
// supports it. Both variants are equivalence-tested against each other.
//
// Reductions accumulate lane-wise, so scalar and vector variants may differ
// by floating-point reassociation; within one selected backend results are
// bit-reproducible.

enum class Backend { Scalar, Simd };

// Backend currently used by the free functions below.
Backend active_backend();

// True when the vectorized variant can run on this CPU.
bool simd_available();

// Testing hook. Throws std::runtime_error if the backend cannot run here.
void force_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double squared_l2(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// out = wa*a + wb*b        (out may alias a or b)
void lincomb2(double wa, const double* a, double wb, const double* b,
              double* out, std::size_t n);
// out = wa*a + wb*b + wc*c (out may alias any input)
void lincomb3(double wa, const double* a, double wb, const double* b,
              double wc, const double* c, double* out, std::size_t n);
// out = min(max(a, lo), hi); bounds are attained exactly
void clamp(const double* a, double lo, double hi, double* out, std::size_t n);

namespace detail {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*squared_l2)(const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*lincomb2)(double, const double*, double, const double*, double*,
                   std::size_t);
  void (*lincomb3)(double, const double*, double, const double*, double,
                   const double*, double*, std::size_t);
  void (*clamp)(const double*, double, double, double*, std::size_t);
};

const Ops& scalar_ops();

struct SimdVariant {
  const Ops* ops;
  bool needs_avx2;  // translation unit was compiled with AVX2/FMA codegen
};

const SimdVariant& simd_variant();

}  // namespace detail

}  // namespace nofs::kernels
