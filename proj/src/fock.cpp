#include "qrep/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qrep {

FockBasis::FockBasis(int modes_, int cutoff_) : modes(modes_), cutoff(cutoff_) {
    if (modes_ < 1 || cutoff_ < 1)
        throw std::invalid_argument("FockBasis requires modes >= 1 and cutoff >= 1");
    dim = 1;
    for (int i = 0; i < modes_; ++i) {
        const std::size_t next = dim * static_cast<std::size_t>(cutoff_ + 1);
        if (next / (cutoff_ + 1) != dim || next > (1u << 26))
            throw std::invalid_argument("FockBasis dimension too large");
        dim = next;
    }
}

std::size_t FockBasis::stride(int mode) const {
    std::size_t s = 1;
    for (int i = mode + 1; i < modes; ++i) s *= static_cast<std::size_t>(cutoff + 1);
    return s;
}

std::size_t FockBasis::index_of(const std::vector<int>& occ) const {
    if (static_cast<int>(occ.size()) != modes)
        throw std::invalid_argument("occupation list length != modes");
    std::size_t idx = 0;
    for (int i = 0; i < modes; ++i) {
        if (occ[i] < 0 || occ[i] > cutoff)
            throw std::invalid_argument("occupation " + std::to_string(occ[i]) +
                                        " outside [0, cutoff]");
        idx = idx * static_cast<std::size_t>(cutoff + 1) + static_cast<std::size_t>(occ[i]);
    }
    return idx;
}

std::vector<int> FockBasis::occupation_of(std::size_t index) const {
    std::vector<int> occ(modes);
    for (int i = modes - 1; i >= 0; --i) {
        occ[i] = static_cast<int>(index % (cutoff + 1));
        index /= static_cast<std::size_t>(cutoff + 1);
    }
    return occ;
}

int FockBasis::occupation_of(std::size_t index, int mode) const {
    return static_cast<int>((index / stride(mode)) % (cutoff + 1));
}

int FockBasis::total_photons(std::size_t index) const {
    int total = 0;
    for (int i = 0; i < modes; ++i) {
        total += static_cast<int>(index % (cutoff + 1));
        index /= static_cast<std::size_t>(cutoff + 1);
    }
    return total;
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(norm(v) - 1.0) <= tol;
}

void DensityMatrix::validate(double tol) const {
    if (std::abs(trace(m) - cxd{1.0, 0.0}) > tol)
        throw std::runtime_error("density matrix trace differs from 1");
    if (!is_hermitian(m, tol)) throw std::runtime_error("density matrix not Hermitian");
    if (min_eigenvalue_hermitian(m) < -tol)
        throw std::runtime_error("density matrix has a negative eigenvalue");
}

Operator annihilation(const FockBasis& basis, int mode) {
    if (mode < 0 || mode >= basis.modes) throw std::invalid_argument("mode out of range");
    Mat m(basis.dim);
    const std::size_t s = basis.stride(mode);
    for (std::size_t col = 0; col < basis.dim; ++col) {
        const int n = basis.occupation_of(col, mode);
        if (n == 0) continue;
        m.a[(col - s) * basis.dim + col] = std::sqrt(static_cast<double>(n));
    }
    return {basis, std::move(m)};
}

Operator creation(const FockBasis& basis, int mode) {
    Operator a = annihilation(basis, mode);
    return {basis, dagger(a.m)};
}

Operator number_operator(const FockBasis& basis) {
    Mat m(basis.dim);
    for (std::size_t i = 0; i < basis.dim; ++i) m(i, i) = static_cast<double>(basis.total_photons(i));
    return {basis, std::move(m)};
}

Operator mode_number_operator(const FockBasis& basis, int mode) {
    if (mode < 0 || mode >= basis.modes) throw std::invalid_argument("mode out of range");
    Mat m(basis.dim);
    for (std::size_t i = 0; i < basis.dim; ++i)
        m(i, i) = static_cast<double>(basis.occupation_of(i, mode));
    return {basis, std::move(m)};
}

Operator matrix_function_of_number(const FockBasis& basis,
                                   const std::function<cxd(int)>& f) {
    Mat m(basis.dim);
    // One evaluation per distinct total, not per basis state.
    std::vector<cxd> cache(static_cast<std::size_t>(basis.modes * basis.cutoff) + 1);
    for (std::size_t n = 0; n < cache.size(); ++n) cache[n] = f(static_cast<int>(n));
    for (std::size_t i = 0; i < basis.dim; ++i) m(i, i) = cache[basis.total_photons(i)];
    return {basis, std::move(m)};
}

Operator projector_from_states(const std::vector<StateVector>& states, double tol) {
    if (states.empty()) throw std::invalid_argument("projector_from_states: empty set");
    const FockBasis& basis = states.front().basis;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].basis != basis)
            throw std::invalid_argument("projector_from_states: mixed bases");
        for (std::size_t j = i; j < states.size(); ++j) {
            const cxd g = dot(states[i].v, states[j].v);
            const cxd want = (i == j) ? cxd{1.0, 0.0} : cxd{0.0, 0.0};
            if (std::abs(g - want) > tol)
                throw std::invalid_argument(
                    "projector_from_states: input not orthonormal, Gram(" +
                    std::to_string(i) + "," + std::to_string(j) + ") = (" +
                    std::to_string(g.real()) + "," + std::to_string(g.imag()) + ")");
        }
    }
    Mat p(basis.dim);
    for (const auto& s : states) add_scaled(p, 1.0, outer(s.v, s.v));
    return {basis, std::move(p)};
}

Operator tensor(const Operator& a, const Operator& b) {
    if (a.basis.cutoff != b.basis.cutoff)
        throw std::invalid_argument("tensor: cutoffs differ");
    FockBasis joint(a.basis.modes + b.basis.modes, a.basis.cutoff);
    return {joint, kron(a.m, b.m)};
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    if (a.basis.cutoff != b.basis.cutoff)
        throw std::invalid_argument("tensor: cutoffs differ");
    FockBasis joint(a.basis.modes + b.basis.modes, a.basis.cutoff);
    return {joint, kron(a.v, b.v)};
}

Operator tensor_embed(const Operator& op, const FockBasis& full, int first_mode) {
    if (op.basis.cutoff != full.cutoff)
        throw std::invalid_argument("tensor_embed: cutoffs differ");
    if (first_mode < 0 || first_mode + op.basis.modes > full.modes)
        throw std::invalid_argument("tensor_embed: mode block out of range");
    const std::size_t before = [&] {
        std::size_t d = 1;
        for (int i = 0; i < first_mode; ++i) d *= static_cast<std::size_t>(full.cutoff + 1);
        return d;
    }();
    const std::size_t after = full.dim / (before * op.basis.dim);
    Mat m(full.dim);
    for (std::size_t p = 0; p < before; ++p)
        for (std::size_t i = 0; i < op.basis.dim; ++i)
            for (std::size_t j = 0; j < op.basis.dim; ++j) {
                const cxd v = op.m(i, j);
                if (v == cxd{}) continue;
                for (std::size_t q = 0; q < after; ++q) {
                    const std::size_t row = (p * op.basis.dim + i) * after + q;
                    const std::size_t col = (p * op.basis.dim + j) * after + q;
                    m.a[row * full.dim + col] = v;
                }
            }
    return {full, std::move(m)};
}

DensityMatrix partial_trace_modes(const DensityMatrix& rho,
                                  const std::vector<int>& traced_modes) {
    const FockBasis& basis = rho.basis;
    std::vector<bool> traced(basis.modes, false);
    for (int m : traced_modes) {
        if (m < 0 || m >= basis.modes) throw std::invalid_argument("traced mode out of range");
        if (traced[m]) throw std::invalid_argument("mode traced twice");
        traced[m] = true;
    }
    const int kept = basis.modes - static_cast<int>(traced_modes.size());
    if (kept < 1) throw std::invalid_argument("cannot trace out every mode");
    FockBasis out_basis(kept, basis.cutoff);

    // Decompose each flat index into (kept-part, traced-part) indices.
    const std::size_t traced_dim = basis.dim / out_basis.dim;
    std::vector<std::size_t> offset(out_basis.dim * traced_dim);
    {
        std::vector<int> occ(basis.modes);
        for (std::size_t k = 0; k < out_basis.dim; ++k) {
            const auto kocc = out_basis.occupation_of(k);
            for (std::size_t t = 0; t < traced_dim; ++t) {
                std::size_t tt = t;
                // traced occupations enumerated lexicographically, slowest first
                std::vector<int> tocc(traced_modes.size());
                for (int i = static_cast<int>(traced_modes.size()) - 1; i >= 0; --i) {
                    tocc[i] = static_cast<int>(tt % (basis.cutoff + 1));
                    tt /= static_cast<std::size_t>(basis.cutoff + 1);
                }
                int tpos = 0, kpos = 0;
                for (int m = 0; m < basis.modes; ++m)
                    occ[m] = traced[m] ? tocc[tpos++] : kocc[kpos++];
                offset[k * traced_dim + t] = basis.index_of(occ);
            }
        }
    }
    Mat out(out_basis.dim);
    for (std::size_t i = 0; i < out_basis.dim; ++i)
        for (std::size_t j = 0; j < out_basis.dim; ++j) {
            cxd s = 0.0;
            for (std::size_t t = 0; t < traced_dim; ++t)
                s += rho.m(offset[i * traced_dim + t], offset[j * traced_dim + t]);
            out(i, j) = s;
        }
    return {out_basis, std::move(out)};
}

StateVector basis_state(const FockBasis& basis, const std::vector<int>& occ) {
    Vec v(basis.dim);
    v[basis.index_of(occ)] = 1.0;
    return {basis, std::move(v)};
}

DensityMatrix random_density_matrix(const FockBasis& basis, Rng& rng) {
    return {basis, random_density(basis.dim, rng)};
}

}  // namespace qrep
