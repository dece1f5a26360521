#include "rotex/kernels.hpp"

namespace rotex::kernels {
namespace {

// Explicit arithmetic: std::complex operator* goes through __muldc3 for the
// inf/nan corner cases, which is both slow and irrelevant here.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

void real_matvec(const double* A, std::size_t n_rows, std::size_t n_cols,
                 const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double* row = A + i * n_cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < n_cols; ++j) {
      re += row[j] * x[j].real();
      im += row[j] * x[j].imag();
    }
    y[i] = {re, im};
  }
}

void cmul_inplace(cplx* x, const cplx* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = mul(x[i], p[i]);
}

void coherence_accumulate(cplx* acc, const double* a, const cplx* c,
                          std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx t = mul(std::conj(c[i]), c[i + 1]);
    const double s = w * a[i];
    acc[i] += cplx{s * t.real(), s * t.imag()};
  }
}

void phasor_series(const cplx* rho, const cplx* start, const cplx* step,
                   std::size_t n_terms, double* out, std::size_t n_t) {
  for (std::size_t j = 0; j < n_terms; ++j) {
    cplx cur = mul(rho[j], start[j]);
    const cplx z = step[j];
    for (std::size_t k = 0; k < n_t; ++k) {
      out[k] += cur.real();
      cur = mul(cur, z);
    }
  }
}

constexpr KernelTable kScalar{
    Isa::scalar, &real_matvec, &cmul_inplace, &coherence_accumulate, &phasor_series};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace rotex::kernels
