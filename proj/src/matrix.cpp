#include "qrep/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qrep {

Mat Mat::identity(std::size_t size) {
    Mat m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
    return m;
}

namespace {
void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}
}  // namespace

// ---- vector ops ----

cxd dot(const Vec& x, const Vec& y) {
    require_same(x.n, y.n, "dot");
    return kernels().dotc(x.a.data(), y.a.data(), x.n);
}

double norm(const Vec& x) { return std::sqrt(std::max(0.0, dot(x, x).real())); }

void scale(Vec& x, cxd s) {
    for (auto& v : x.a) v *= s;
}

void axpy(Vec& y, cxd s, const Vec& x) {
    require_same(x.n, y.n, "axpy");
    kernels().axpy(s, x.a.data(), y.a.data(), x.n);
}

double max_abs_diff(const Vec& x, const Vec& y) {
    require_same(x.n, y.n, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

Vec matvec(const Mat& a, const Vec& x) {
    require_same(a.n, x.n, "matvec");
    Vec y(x.n);
    kernels().matvec(a.a.data(), x.a.data(), y.a.data(), a.n);
    return y;
}

// ---- matrix ops ----

Mat mul(const Mat& a, const Mat& b) {
    require_same(a.n, b.n, "mul");
    Mat c(a.n);
    kernels().matmul(a.a.data(), b.a.data(), c.a.data(), a.n);
    return c;
}

void mul_acc(Mat& c, const Mat& a, const Mat& b) {
    require_same(a.n, b.n, "mul_acc");
    require_same(a.n, c.n, "mul_acc");
    kernels().matmul(a.a.data(), b.a.data(), c.a.data(), a.n);
}

Mat dagger(const Mat& a) {
    Mat d(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) d(j, i) = std::conj(a(i, j));
    return d;
}

Mat add(const Mat& a, const Mat& b) {
    require_same(a.n, b.n, "add");
    Mat c = a;
    kernels().axpy(1.0, b.a.data(), c.a.data(), b.a.size());
    return c;
}

Mat sub(const Mat& a, const Mat& b) {
    require_same(a.n, b.n, "sub");
    Mat c = a;
    kernels().axpy(-1.0, b.a.data(), c.a.data(), b.a.size());
    return c;
}

void add_scaled(Mat& y, cxd s, const Mat& x) {
    require_same(x.n, y.n, "add_scaled");
    kernels().axpy(s, x.a.data(), y.a.data(), x.a.size());
}

void scale(Mat& a, cxd s) {
    for (auto& v : a.a) v *= s;
}

cxd trace(const Mat& a) {
    cxd t = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) t += a(i, i);
    return t;
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (const auto& v : a.a) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    require_same(a.n, b.n, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

double fro_norm(const Mat& a) {
    double s = 0.0;
    for (const auto& v : a.a) s += std::norm(v);
    return std::sqrt(s);
}

Mat outer(const Vec& x, const Vec& y) {
    require_same(x.n, y.n, "outer");
    Mat m(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        if (x.a[i] == cxd{}) continue;
        for (std::size_t j = 0; j < x.n; ++j) m(i, j) = x.a[i] * std::conj(y.a[j]);
    }
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat c(a.n * b.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) {
            const cxd aij = a(i, j);
            if (aij == cxd{}) continue;
            for (std::size_t k = 0; k < b.n; ++k)
                for (std::size_t l = 0; l < b.n; ++l)
                    c(i * b.n + k, j * b.n + l) = aij * b(k, l);
        }
    return c;
}

Vec kron(const Vec& x, const Vec& y) {
    Vec z(x.n * y.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        if (x.a[i] == cxd{}) continue;
        for (std::size_t j = 0; j < y.n; ++j) z.a[i * y.n + j] = x.a[i] * y.a[j];
    }
    return z;
}

bool is_hermitian(const Mat& a, double tol) {
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i; j < a.n; ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
    return true;
}

bool is_unitary(const Mat& a, double tol) {
    const Mat p = mul(dagger(a), a);
    return max_abs_diff(p, Mat::identity(a.n)) <= tol;
}

Mat partial_trace_front(const Mat& rho, std::size_t dim_front, std::size_t dim_back) {
    require_same(rho.n, dim_front * dim_back, "partial_trace_front");
    Mat out(dim_back);
    for (std::size_t f = 0; f < dim_front; ++f)
        for (std::size_t i = 0; i < dim_back; ++i)
            for (std::size_t j = 0; j < dim_back; ++j)
                out(i, j) += rho(f * dim_back + i, f * dim_back + j);
    return out;
}

Mat partial_trace_back(const Mat& rho, std::size_t dim_front, std::size_t dim_back) {
    require_same(rho.n, dim_front * dim_back, "partial_trace_back");
    Mat out(dim_front);
    for (std::size_t i = 0; i < dim_front; ++i)
        for (std::size_t j = 0; j < dim_front; ++j) {
            cxd s = 0.0;
            for (std::size_t b = 0; b < dim_back; ++b)
                s += rho(i * dim_back + b, j * dim_back + b);
            out(i, j) = s;
        }
    return out;
}

// ---- Jacobi eigensolver ----

EigH eig_hermitian(const Mat& a, int max_sweeps) {
    if (!is_hermitian(a, 1e-10 * std::max(1.0, max_abs(a))))
        throw std::invalid_argument("eig_hermitian: input is not Hermitian");
    const std::size_t n = a.n;
    Mat m = a;
    // Symmetrize exactly so rounding asymmetry cannot accumulate.
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = cxd{m(i, i).real(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const cxd avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    Mat v = Mat::identity(n);
    const double scale = std::max(fro_norm(m), 1e-300);
    const double stop = 1e-15 * scale;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(m(p, q));
        if (std::sqrt(2.0 * off) <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cxd apq = m(p, q);
                const double g = std::abs(apq);
                if (g <= stop / n) continue;
                const cxd phase = apq / g;  // e^{i phi}
                const double alpha = m(p, p).real();
                const double beta = m(q, q).real();
                const double tau = (alpha - beta) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cxd spp = s * phase;             // s e^{i phi}
                const cxd spm = s * std::conj(phase);  // s e^{-i phi}

                // A <- U† A U with U = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const cxd arp = m(r, p);
                    const cxd arq = m(r, q);
                    m(r, p) = c * arp + spm * arq;
                    m(r, q) = -spp * arp + c * arq;
                    m(p, r) = std::conj(m(r, p));
                    m(q, r) = std::conj(m(r, q));
                }
                const double app = alpha * c * c + 2.0 * g * s * c + beta * s * s;
                const double aqq = alpha * s * s - 2.0 * g * s * c + beta * c * c;
                m(p, p) = app;
                m(q, q) = aqq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const cxd vrp = v(r, p);
                    const cxd vrq = v(r, q);
                    v(r, p) = c * vrp + spm * vrq;
                    v(r, q) = -spp * vrp + c * vrq;
                }
            }
        }
    }

    EigH out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return m(x, x).real() < m(y, y).real();
    });
    out.vectors = Mat(n);
    for (std::size_t col = 0; col < n; ++col) {
        out.values[col] = m(order[col], order[col]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = v(r, order[col]);
    }
    return out;
}

std::vector<double> eigvals_hermitian(const Mat& a) { return eig_hermitian(a).values; }

double min_eigenvalue_hermitian(const Mat& a) {
    const auto vals = eigvals_hermitian(a);
    return vals.empty() ? 0.0 : vals.front();
}

Mat expm_i_hermitian(const Mat& h, double t) {
    const EigH e = eig_hermitian(h);
    const std::size_t n = h.n;
    Mat w = e.vectors;  // columns scaled by the eigenvalue phases
    for (std::size_t col = 0; col < n; ++col) {
        const cxd ph = std::polar(1.0, t * e.values[col]);
        for (std::size_t r = 0; r < n; ++r) w(r, col) *= ph;
    }
    return mul(w, dagger(e.vectors));
}

// ---- RNG ----

std::uint64_t Rng::next_u64() {
    // splitmix64: tiny, seedable, identical everywhere.
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare = r * std::sin(theta);
    have_spare = true;
    return r * std::cos(theta);
}

cxd Rng::gaussian_cxd() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
}

Vec random_state(std::size_t dim, Rng& rng) {
    Vec v(dim);
    for (auto& x : v.a) x = rng.gaussian_cxd();
    const double nrm = norm(v);
    scale(v, 1.0 / nrm);
    return v;
}

Mat random_density(std::size_t dim, Rng& rng, std::size_t rank) {
    if (rank == 0 || rank > dim) rank = dim;
    // rho = G G† / tr(G G†) with G a dim-by-rank Ginibre block.
    std::vector<cxd> g(dim * rank);
    for (auto& x : g) x = rng.gaussian_cxd();
    Mat rho(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            cxd s = 0.0;
            for (std::size_t k = 0; k < rank; ++k) s += g[i * rank + k] * std::conj(g[j * rank + k]);
            rho(i, j) = s;
        }
    const double tr = trace(rho).real();
    scale(rho, 1.0 / tr);
    return rho;
}

}  // namespace qrep
