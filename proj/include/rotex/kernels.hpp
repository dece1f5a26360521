#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; `active()` returns the table chosen at
// startup from cpuid. Tests compare the two tables directly.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace rotex::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  /// y = A x with A real, row-major n_rows x n_cols.
  void (*real_matvec)(const double* A, std::size_t n_rows, std::size_t n_cols,
                      const cplx* x, cplx* y);

  /// x[i] *= p[i]
  void (*cmul_inplace)(cplx* x, const cplx* p, std::size_t n);

  /// acc[i] += w * a[i] * conj(c[i]) * c[i + 1], i < n
  void (*coherence_accumulate)(cplx* acc, const double* a, const cplx* c,
                               std::size_t n, double w);

  /// out[k] += sum_j Re(rho[j] * start[j] * step[j]^k) for k < n_t.
  /// Phasors advance by repeated multiplication, so n_t should stay modest
  /// (rounding grows linearly in k).
  void (*phasor_series)(const cplx* rho, const cplx* start, const cplx* step,
                        std::size_t n_terms, double* out, std::size_t n_t);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 path is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table used by the library. Selected once, on first call.
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace rotex::kernels
