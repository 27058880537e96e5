#include "qrep/kernels.hpp"

#if defined(QREP_HAVE_AVX2)

#include <immintrin.h>

namespace qrep {
namespace {

// Packing: one __m256d holds two complex doubles [re0, im0, re1, im1].
// Complex multiply with a broadcast scalar (ar + i*ai):
//   t   = ai * swap(v)                      [ai*vi0, ai*vr0, ...]
//   out = fmaddsub(ar, v, t)                even: ar*vr - ai*vi (real)
//                                           odd:  ar*vi + ai*vr (imag)

inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d v) {
    const __m256d vs = _mm256_permute_pd(v, 0x5);
    return _mm256_fmaddsub_pd(ar, v, _mm256_mul_pd(ai, vs));
}

void axpy_avx2(cxd a, const cxd* x, cxd* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, cmul_bcast(ar, ai, xv)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

cxd dotc_avx2(const cxd* x, const cxd* y, std::size_t n) {
    // conj(x)*y: re = xr*yr + xi*yi, im = xr*yi - xi*yr.
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    const double* xp = reinterpret_cast<const double*>(x);
    const double* yp = reinterpret_cast<const double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
    }
    // acc_re lanes: [xr*yr, xi*yi, ...] -> sum all; acc_im: [xr*yi, xi*yr, ...]
    // -> sum of (even - odd).
    alignas(32) double re4[4], im4[4];
    _mm256_store_pd(re4, acc_re);
    _mm256_store_pd(im4, acc_im);
    double re = re4[0] + re4[1] + re4[2] + re4[3];
    double im = (im4[0] - im4[1]) + (im4[2] - im4[3]);
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

void matvec_avx2(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = reinterpret_cast<const double*>(a + i * n);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const __m256d av = _mm256_loadu_pd(row + 2 * j);
            const __m256d xv = _mm256_loadu_pd(xp + 2 * j);
            const __m256d ar = _mm256_movedup_pd(av);          // [ar0,ar0,ar1,ar1]
            const __m256d ai = _mm256_permute_pd(av, 0xF);     // [ai0,ai0,ai1,ai1]
            acc = _mm256_add_pd(acc, cmul_bcast(ar, ai, xv));
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        double re = lanes[0] + lanes[2];
        double im = lanes[1] + lanes[3];
        for (; j < n; ++j) {
            const cxd p = a[i * n + j] * x[j];
            re += p.real();
            im += p.imag();
        }
        y[i] += cxd{re, im};
    }
}

void matmul_avx2(const cxd* a, const cxd* b, cxd* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = reinterpret_cast<double*>(c + i * n);
        for (std::size_t k = 0; k < n; ++k) {
            const cxd aik = a[i * n + k];
            if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
            const __m256d ar = _mm256_set1_pd(aik.real());
            const __m256d ai = _mm256_set1_pd(aik.imag());
            const double* brow = reinterpret_cast<const double*>(b + k * n);
            std::size_t j = 0;
            for (; j + 2 <= n; j += 2) {
                const __m256d bv = _mm256_loadu_pd(brow + 2 * j);
                const __m256d cv = _mm256_loadu_pd(crow + 2 * j);
                _mm256_storeu_pd(crow + 2 * j,
                                 _mm256_add_pd(cv, cmul_bcast(ar, ai, bv)));
            }
            for (; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    }
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{"avx2", axpy_avx2, dotc_avx2, matvec_avx2,
                                   matmul_avx2};
    return table;
}

}  // namespace qrep

#endif  // QREP_HAVE_AVX2
