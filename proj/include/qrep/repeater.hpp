#pragma once

#include "qrep/code.hpp"

namespace qrep {

enum class RepeaterKind { direct, swap };

// The repeater's ancilla register. The direct architecture gets an abstract
// K(M+1)-level system with orthonormal labels (k, i), k = 0..K-1, i = 0..M:
// (k, 0) is a fresh state |k>_a and (k, i) the transferred error label
// |k^(i)>_a. The swap architecture's ancilla is a logical qubit.
struct AncillaBasis {
    RepeaterKind kind = RepeaterKind::direct;
    int k_states = 1;  // K (direct only)
    int modes = 0;     // M of the code
    std::size_t dim = 0;

    std::size_t index_of(int k, int i) const;  // direct labels
};

// A synthesized repeater: projector-sum Hamiltonian H on system ⊗ ancilla
// (ancilla index fastest) and its unitary U = 1 − 2H.
struct RepeaterSpec {
    CodeSpec code;
    AncillaBasis ancilla;
    ErrorSpaces spaces;
    Mat hamiltonian;
    Mat unitary;
    std::size_t projector_rank = 0;
};

// H = sum over k = 1..K, i = 1..M, j = 0,1 of dyads of
// (|j_L>|k^(i)> − |j^(i)>|k>)/sqrt(2); rank 2KM. K = 1 is the minimal
// construction.
RepeaterSpec build_direct(const CodeSpec& code, int k_states = 1);

// H = sum over i = 0..M of dyads of (|0^(i)>|1> − |1^(i)>|0>)/sqrt(2) with
// |j^(0)> = |j_L>; rank M+1. U acts as an exact partial swap: logical content
// moves into the ancilla, the fresh ancilla state (wearing the error label)
// moves into the system.
RepeaterSpec build_swap(const CodeSpec& code);

// U = 1 − 2H. Throws std::invalid_argument when H fails H² = H beyond tol.
Mat unitary_from_projector(const Mat& h, double tol = 1e-10);

// Max deviation of U(|ψ^(i)> ⊗ |φ>) from |ψ> ⊗ |φ^(i)> over seeded random
// (ψ, φ) trials, all i = 1..M, plus the no-error case (code-space input with
// a fresh ancilla is left unchanged).
double verify_transfer_action(const RepeaterSpec& spec, int trials, std::uint64_t seed);

// Max deviation of U(|ψ^(i)>_s ⊗ |φ>_a) from |φ^(i)>_s ⊗ |ψ>_a over seeded
// trials, i = 0..M (i = 0 swaps within the code space itself).
double verify_swap_action(const RepeaterSpec& spec, int trials, std::uint64_t seed);

// System-space recovery: R^(0) = 1 − Σ P^(i) plus one transfer
// R^(i) = |0_L><0^(i)| + |1_L><1^(i)| per mode.
struct RecoveryChannel {
    std::size_t dim = 0;
    std::vector<Mat> kraus;   // R^(0) first
    std::vector<Mat> kraus_dag;

    double completeness_residual() const;
};

RecoveryChannel recovery_channel(const CodeSpec& code);

Mat apply_recovery(const RecoveryChannel& r, const Mat& rho);

// Stinespring consistency of the recovery channel against the unitaries:
// direct — Tr_anc[U (ρ ⊗ |k><k|_a) U†] = R(ρ) on the whole system space;
// swap — Tr_sys[U (ρ ⊗ |φ><φ|_a) U†], re-embedded through the codewords,
// equals R(ρ) for ρ supported on the code ⊕ error-space span and any
// normalized ancilla code state |φ>. Both return the max deviation over
// seeded random trials.
double recovery_direct_consistency(const RepeaterSpec& spec, const RecoveryChannel& rec,
                                   int trials, std::uint64_t seed);
double recovery_swap_consistency(const RepeaterSpec& spec, const RecoveryChannel& rec,
                                 int trials, std::uint64_t seed);

}  // namespace qrep
