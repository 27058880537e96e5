#pragma once

#include "qrep/kernels.hpp"

#include <cstdint>
#include <vector>

namespace qrep {

// Dense complex vector / square matrix. Thin value types; all arithmetic goes
// through free functions backed by the kernel layer.
struct Vec {
    std::size_t n = 0;
    std::vector<cxd> a;

    Vec() = default;
    explicit Vec(std::size_t size) : n(size), a(size, cxd{}) {}

    cxd& operator[](std::size_t i) { return a[i]; }
    const cxd& operator[](std::size_t i) const { return a[i]; }
};

struct Mat {
    std::size_t n = 0;  // square dimension
    std::vector<cxd> a; // row-major, n*n entries

    Mat() = default;
    explicit Mat(std::size_t size) : n(size), a(size * size, cxd{}) {}

    static Mat identity(std::size_t size);

    cxd& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const cxd& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// ---- vector ops ----
cxd dot(const Vec& x, const Vec& y);  // sum conj(x_i) y_i
double norm(const Vec& x);
void scale(Vec& x, cxd s);
void axpy(Vec& y, cxd s, const Vec& x);  // y += s*x
double max_abs_diff(const Vec& x, const Vec& y);
Vec matvec(const Mat& a, const Vec& x);

// ---- matrix ops ----
Mat mul(const Mat& a, const Mat& b);
void mul_acc(Mat& c, const Mat& a, const Mat& b);  // c += a*b
Mat dagger(const Mat& a);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
void add_scaled(Mat& y, cxd s, const Mat& x);  // y += s*x
void scale(Mat& a, cxd s);
cxd trace(const Mat& a);
double max_abs(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);
double fro_norm(const Mat& a);
Mat outer(const Vec& x, const Vec& y);  // |x><y|
Mat kron(const Mat& a, const Mat& b);   // a varies slowest
Vec kron(const Vec& x, const Vec& y);
bool is_hermitian(const Mat& a, double tol);
bool is_unitary(const Mat& a, double tol);

// Trace out the first (dim_front) or second (dim_back) tensor factor of a
// density matrix on a bipartite space of dimension dim_front * dim_back.
Mat partial_trace_front(const Mat& rho, std::size_t dim_front, std::size_t dim_back);
Mat partial_trace_back(const Mat& rho, std::size_t dim_front, std::size_t dim_back);

// ---- Hermitian eigenproblems (cyclic Jacobi) ----
// Used on validation paths (positivity checks, spectral tests, matrix
// exponentials of Hermitian generators); not performance-critical.
struct EigH {
    std::vector<double> values;  // ascending
    Mat vectors;                 // columns are the matching eigenvectors
};
EigH eig_hermitian(const Mat& a, int max_sweeps = 64);
std::vector<double> eigvals_hermitian(const Mat& a);
double min_eigenvalue_hermitian(const Mat& a);
Mat expm_i_hermitian(const Mat& h, double t);  // exp(i*t*h)

// ---- deterministic RNG helpers ----
// std::uniform_real_distribution / normal_distribution are implementation
// defined; this generator produces identical streams everywhere.
struct Rng {
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64();
    double uniform();            // [0, 1)
    double gaussian();           // Box-Muller, one value per call
    cxd gaussian_cxd();

    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;
};

Vec random_state(std::size_t dim, Rng& rng);                       // unit norm
Mat random_density(std::size_t dim, Rng& rng, std::size_t rank = 0);  // Ginibre

}  // namespace qrep
