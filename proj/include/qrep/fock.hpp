#pragma once

#include "qrep/matrix.hpp"

#include <functional>
#include <vector>

namespace qrep {

// Truncated bosonic Fock space: `modes` oscillators, each kept up to `cutoff`
// photons, dimension (cutoff+1)^modes. Flat indices are lexicographic with
// mode 0 varying slowest.
struct FockBasis {
    int modes = 0;
    int cutoff = 0;
    std::size_t dim = 0;

    FockBasis() = default;
    FockBasis(int modes_, int cutoff_);

    std::size_t stride(int mode) const;  // (cutoff+1)^(modes-1-mode)
    std::size_t index_of(const std::vector<int>& occ) const;
    std::vector<int> occupation_of(std::size_t index) const;
    int occupation_of(std::size_t index, int mode) const;
    int total_photons(std::size_t index) const;

    bool operator==(const FockBasis& o) const {
        return modes == o.modes && cutoff == o.cutoff;
    }
    bool operator!=(const FockBasis& o) const { return !(*this == o); }
};

struct Operator {
    FockBasis basis;
    Mat m;
};

struct StateVector {
    FockBasis basis;
    Vec v;

    bool is_normalized(double tol = 1e-12) const;
};

struct DensityMatrix {
    FockBasis basis;
    Mat m;

    // trace 1, Hermitian, eigenvalues >= -tol
    void validate(double tol = 1e-10) const;
};

// Ladder and number operators on the truncated space. annihilation lowers the
// given mode (exact); its dagger raises and annihilates occupation == cutoff.
Operator annihilation(const FockBasis& basis, int mode);
Operator creation(const FockBasis& basis, int mode);
Operator number_operator(const FockBasis& basis);             // total photon number
Operator mode_number_operator(const FockBasis& basis, int mode);
// Diagonal operator f(total occupation).
Operator matrix_function_of_number(const FockBasis& basis,
                                   const std::function<cxd(int)>& f);

// Sum of dyads over an orthonormal family; throws std::invalid_argument
// naming the offending Gram entry when the family is not orthonormal.
Operator projector_from_states(const std::vector<StateVector>& states,
                               double tol = 1e-10);

// Tensor products / embeddings. Cutoffs must match; the left factor's modes
// come first (slowest).
Operator tensor(const Operator& a, const Operator& b);
StateVector tensor(const StateVector& a, const StateVector& b);
// Embed an operator acting on a contiguous mode block [first, first+op.modes)
// of `full`, identity elsewhere.
Operator tensor_embed(const Operator& op, const FockBasis& full, int first_mode);

// Trace out a set of modes (indices into basis.modes, each listed once).
DensityMatrix partial_trace_modes(const DensityMatrix& rho,
                                  const std::vector<int>& traced_modes);

StateVector basis_state(const FockBasis& basis, const std::vector<int>& occ);
DensityMatrix random_density_matrix(const FockBasis& basis, Rng& rng);

}  // namespace qrep
