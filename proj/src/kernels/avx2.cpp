// Compiled with -mavx2 -mfma. Nothing in here may run before dispatch.cpp
// has confirmed CPU support.

#include <immintrin.h>

#include "rotex/kernels.hpp"

namespace rotex::kernels {
namespace {

inline double hsum_re(__m256d v) {
  // [re0 im0 re1 im1] -> re0 + re1
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  return _mm_cvtsd_f64(_mm_add_sd(lo, hi));
}

inline cplx hsum_c(__m256d v) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  alignas(16) double o[2];
  _mm_store_pd(o, s);
  return {o[0], o[1]};
}

// Two complex products at once: [a0 b0] * [p0 p1].
inline __m256d cmul2(__m256d x, __m256d p) {
  const __m256d p_re = _mm256_movedup_pd(p);
  const __m256d p_im = _mm256_permute_pd(p, 0xF);
  const __m256d x_sw = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, p_re, _mm256_mul_pd(x_sw, p_im));
}

// [v0 v1] -> [v0 v0 v1 v1]
inline __m256d dup_pairs(const double* v) {
  const __m128d two = _mm_loadu_pd(v);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(two), 0x50);
}

void real_matvec(const double* A, std::size_t n_rows, std::size_t n_cols,
                 const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double* row = A + i * n_cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n_cols; j += 4) {
      acc0 = _mm256_fmadd_pd(dup_pairs(row + j), _mm256_loadu_pd(xd + 2 * j), acc0);
      acc1 = _mm256_fmadd_pd(dup_pairs(row + j + 2), _mm256_loadu_pd(xd + 2 * j + 4), acc1);
    }
    cplx s = hsum_c(_mm256_add_pd(acc0, acc1));
    for (; j < n_cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void cmul_inplace(cplx* x, const cplx* p, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const double* pd = reinterpret_cast<const double*>(p);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d r = cmul2(_mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(pd + 2 * i));
    _mm256_storeu_pd(xd + 2 * i, r);
  }
  for (; i < n; ++i) {
    const cplx a = x[i], b = p[i];
    x[i] = {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
  }
}

void coherence_accumulate(cplx* acc, const double* a, const cplx* c,
                          std::size_t n, double w) {
  double* accd = reinterpret_cast<double*>(acc);
  const double* cd = reinterpret_cast<const double*>(c);
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(cd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(cd + 2 * i + 2);
    // conj(x) * y = [xr yr + xi yi, xr yi - xi yr]
    const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(xv, 0xF), _mm256_permute_pd(yv, 0x5));
    const __m256d prod = _mm256_fmsubadd_pd(_mm256_movedup_pd(xv), yv, t2);
    const __m256d s = _mm256_mul_pd(wv, dup_pairs(a + i));
    _mm256_storeu_pd(accd + 2 * i, _mm256_fmadd_pd(s, prod, _mm256_loadu_pd(accd + 2 * i)));
  }
  for (; i < n; ++i) {
    const cplx xc = c[i], yc = c[i + 1];
    const double s = w * a[i];
    acc[i] += cplx{s * (xc.real() * yc.real() + xc.imag() * yc.imag()),
                   s * (xc.real() * yc.imag() - xc.imag() * yc.real())};
  }
}

void phasor_series(const cplx* rho, const cplx* start, const cplx* step,
                   std::size_t n_terms, double* out, std::size_t n_t) {
  // Pairs of terms advance together; the odd one out is handled in scalar.
  const double* rd = reinterpret_cast<const double*>(rho);
  const double* sd = reinterpret_cast<const double*>(start);
  const double* zd = reinterpret_cast<const double*>(step);
  std::size_t j = 0;
  for (; j + 4 <= n_terms; j += 4) {
    __m256d cur0 = cmul2(_mm256_loadu_pd(rd + 2 * j), _mm256_loadu_pd(sd + 2 * j));
    __m256d cur1 = cmul2(_mm256_loadu_pd(rd + 2 * j + 4), _mm256_loadu_pd(sd + 2 * j + 4));
    const __m256d z0 = _mm256_loadu_pd(zd + 2 * j);
    const __m256d z1 = _mm256_loadu_pd(zd + 2 * j + 4);
    for (std::size_t k = 0; k < n_t; ++k) {
      out[k] += hsum_re(_mm256_add_pd(cur0, cur1));
      cur0 = cmul2(cur0, z0);
      cur1 = cmul2(cur1, z1);
    }
  }
  for (; j < n_terms; ++j) {
    cplx cur = rho[j] * start[j];
    const cplx z = step[j];
    for (std::size_t k = 0; k < n_t; ++k) {
      out[k] += cur.real();
      cur = {cur.real() * z.real() - cur.imag() * z.imag(),
             cur.real() * z.imag() + cur.imag() * z.real()};
    }
  }
}

constexpr KernelTable kAvx2{
    Isa::avx2, &real_matvec, &cmul_inplace, &coherence_accumulate, &phasor_series};

}  // namespace

const KernelTable* avx2_table_impl() { return &kAvx2; }

}  // namespace rotex::kernels
