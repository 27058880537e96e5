#pragma once

#include "qrep/fock.hpp"

#include <cstdint>
#include <vector>

namespace qrep {

// One Kraus operator. Pure-loss operators move each basis state to at most
// one other basis state, so a scatter path (O(dim^2) per application) is kept
// alongside the dense matrix; both are used and cross-checked.
struct KrausOp {
    Mat m;
    Mat m_dag;
    std::vector<int> label;  // for loss channels: photons removed per mode
    bool monomial = false;
    std::vector<std::ptrdiff_t> target;  // per column: image row, or -1
    std::vector<cxd> coeff;
};

KrausOp make_kraus(Mat m, std::vector<int> label = {});

struct KrausChannel {
    std::size_t dim = 0;
    std::vector<KrausOp> ops;

    // max |sum_k A_k† A_k - 1|
    double completeness_residual() const;
};

// Pure loss with transmissivity eta on every mode: Kraus operators
// A_k = prod_i sqrt(C(n_i,k_i)) (1-eta)^{k_i/2} eta^{(n_i-k_i)/2} lowering
// mode i by k_i, enumerated lexicographically in k (so ops.front() is the
// no-loss operator and the k = e_i elements are the single-photon losses).
KrausChannel build_loss_channel(const FockBasis& basis, double eta);

Mat apply_channel(const KrausChannel& ch, const Mat& rho, bool force_dense = false);
DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);
// Apply to the trailing tensor factor of a joint state (dim_front * ch.dim).
Mat apply_channel_back(const KrausChannel& ch, const Mat& joint, std::size_t dim_front);

// Beamsplitter dilation: couple each mode to a fresh vacuum mode with
// U = exp[i phi (a†b + a b†)], phi = acos(sqrt(eta)), and trace the
// environment out. Exact on the truncated space because the coupling
// conserves the pair photon number. env_cutoff defaults to the state cutoff
// (always sufficient); lowering it below that is rejected.
Mat stinespring_loss(const FockBasis& basis, const Mat& rho, double eta,
                     int env_cutoff = -1);

struct LindbladParams {
    double gamma = 1.0;
    double time = 0.0;
    double gamma_step = 1e-3;       // RK4 step in units of 1/gamma
    bool self_check = false;        // redo at half step, compare
    double self_check_tol = 1e-8;
};

// rho' = sum_i (gamma/2)(2 a_i rho a_i† - {a_i†a_i, rho}), fixed-step RK4.
// With self_check set, throws std::runtime_error if halving the step moves
// any entry by more than self_check_tol.
Mat lindblad_evolve(const FockBasis& basis, const Mat& rho, const LindbladParams& p);

struct ChannelAgreement {
    double eta = 0.0;
    int states = 0;
    std::uint64_t seed = 0;
    double kraus_vs_stinespring = 0.0;
    double kraus_vs_lindblad = 0.0;
    double completeness = 0.0;
};

// Max entrywise deviations across a battery of seeded random density
// matrices; the Lindblad leg uses gamma = 1, t = -ln(eta).
ChannelAgreement representation_equivalence_report(const FockBasis& basis, double eta,
                                                   int states, std::uint64_t seed);

}  // namespace qrep
