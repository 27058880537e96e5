#include "qrep/kernels.hpp"

namespace qrep {
namespace {

void axpy_scalar(cxd a, const cxd* x, cxd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cxd dotc_scalar(const cxd* x, const cxd* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

void matvec_scalar(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const cxd* row = a + i * n;
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ar = row[j].real(), ai = row[j].imag();
            const double xr = x[j].real(), xi = x[j].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        y[i] += cxd{re, im};
    }
}

void matmul_scalar(const cxd* a, const cxd* b, cxd* c, std::size_t n) {
    // C[i,:] += A[i,k] * B[k,:]; streams rows of B and C.
    for (std::size_t i = 0; i < n; ++i) {
        cxd* crow = c + i * n;
        for (std::size_t k = 0; k < n; ++k) {
            const cxd aik = a[i * n + k];
            if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
            const cxd* brow = b + k * n;
            const double ar = aik.real(), ai = aik.imag();
            for (std::size_t j = 0; j < n; ++j) {
                const double br = brow[j].real(), bi = brow[j].imag();
                crow[j] += cxd{ar * br - ai * bi, ar * bi + ai * br};
            }
        }
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", axpy_scalar, dotc_scalar,
                                   matvec_scalar, matmul_scalar};
    return table;
}

}  // namespace qrep
