#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace qrep {

using cxd = std::complex<double>;

// Dense complex-double kernels used by the matrix layer. Matrices are
// row-major and square. Destination buffers must not alias the sources.
//
// Two implementations exist: a scalar reference and an AVX2+FMA variant.
// Both use the same loop order so results agree to rounding (the vector
// path fuses multiply-adds, so agreement is to ~1e-15 relative, not bitwise).
struct KernelTable {
    const char* name;
    // y[i] += a * x[i], i < n
    void (*axpy)(cxd a, const cxd* x, cxd* y, std::size_t n);
    // sum_i conj(x[i]) * y[i]
    cxd (*dotc)(const cxd* x, const cxd* y, std::size_t n);
    // y += A * x, A is n-by-n
    void (*matvec)(const cxd* a, const cxd* x, cxd* y, std::size_t n);
    // C += A * B, all n-by-n
    void (*matmul)(const cxd* a, const cxd* b, cxd* c, std::size_t n);
};

const KernelTable& scalar_kernels();
const KernelTable& avx2_kernels();  // falls back to scalar when not compiled in

// True when the AVX2 variant is both compiled in and supported by this CPU.
bool avx2_available();

// Active table. Defaults to AVX2 when available; the QREP_ISA environment
// variable ("scalar" or "avx2") overrides the choice at first use.
const KernelTable& kernels();

// Force a table by name ("scalar", "avx2", "auto"). Returns the name of the
// previously active table. Throws std::invalid_argument for unknown names or
// when AVX2 is requested but unavailable.
std::string select_kernels(const std::string& name);

}  // namespace qrep
