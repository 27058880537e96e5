#pragma once

#include "qrep/repeater.hpp"

#include <array>
#include <optional>

namespace qrep {

// One repeater segment: sep_km of fibre at alpha dB/km plus a coupling
// efficiency eta_c at the repeater, eta = eta_c * eta_s.
struct SegmentModel {
    CodeSpec code;
    double eta_c = 1.0;
    double sep_km = 1.0;
    double alpha = 0.2;

    double eta_s() const;
    double eta() const;
    void validate() const;
};

// Secret-key capacity of the bare lossy channel, log2(1/(1-eta)) bits per
// mode; +inf at eta = 1, throws for eta outside (0, 1].
double repeaterless_bound(double eta);
double repeaterless_bound_km(double x_km, double alpha = 0.2);

// p_s = eta^N + sum_i c_i for a code confined to the N-photon eigenspace.
// Throws std::domain_error otherwise: no single success weight exists and the
// chain must be simulated instead.
double success_probability(const CodeSpec& code, double eta);

// The chain asymptotically outperforms the repeaterless bound iff every
// segment returns more code-space weight than the bare fibre transmits:
// p_s(eta_c * eta_s) > eta_s.
bool asymptotic_beat(const CodeSpec& code, double eta_c, double sep_km, double alpha = 0.2);

// Loss at eta followed by the recovery channel, on the system space.
struct SegmentChannel {
    KrausChannel loss;
    RecoveryChannel recovery;
};

SegmentChannel segment_channel(const SegmentModel& model);
Mat apply_segment(const SegmentChannel& seg, const Mat& rho);
// Same, applied to the trailing Fock factor of a qubit ⊗ system state.
Mat apply_segment_back(const SegmentChannel& seg, const Mat& joint, std::size_t dim_front);

// (|0>_A|0_L> + |1>_A|1_L>)/sqrt(2) with the B side pushed through segments;
// A is an abstract qubit and the slow tensor index.
struct ChainState {
    FockBasis system;
    Mat joint;  // dimension 2 * system.dim
    int segments = 0;
};

ChainState initial_chain_state(const CodeSpec& code);
void advance_chain(ChainState& state, const SegmentChannel& seg, int steps = 1);

// B conditioned on the code space, expressed as qubit A ⊗ logical qubit.
struct ConditionedState {
    Mat two_qubit;  // 4x4, unit trace
    double p_in = 0.0;
};

ConditionedState condition_on_code(const ChainState& state, const CodeSpec& code);

// Bell-basis diagonal (Phi+, Phi-, Psi+, Psi-).
std::array<double, 4> bell_diagonal(const Mat& two_qubit);

// Hashing-bound rate max(0, 1 - H(lambda)) of the Bell-twirled state, bits.
double six_state_rate(const Mat& two_qubit);

// Number-eigenspace codes: p_s^n (per mode: / M). Otherwise simulated:
// p_in * six_state_rate (/ M).
double chain_rate_per_mode(const SegmentModel& model, int n, bool per_mode = true);

// Closed forms for the single-mode {|1>,|3>} chain: one segment maps
//   |1><1| -> |1><1|
//   |3><3| -> survival |3><3| + (1 - survival) |1><1|
//   |1><3| -> coherence |1><3|
// with survival = 3 eta^2 - 2 eta^3, coherence = eta^2 + (1-eta) sqrt(3) eta.
struct SingleModeCoeffs {
    double survival = 0.0;
    double coherence = 0.0;
};

SingleModeCoeffs single_mode_coeffs(double eta);
Mat single_mode_two_qubit(double eta, int n);  // conditioned state; p_in = 1
double single_mode_rate(double eta, int n);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    std::vector<double> values() const;
};

struct RegionOptions {
    double alpha = 0.2;
    int n_ceiling = 10000;      // single-mode segment search limit
    double rate_floor = 1e-12;  // chain rates at or below count as zero
    int jobs = 1;
    double refine_tol = 1e-10;  // bisection width for column thresholds
};

struct RegionResult {
    std::vector<double> eta_c;
    std::vector<double> sep_km;
    std::vector<std::uint8_t> beats;      // [ie * sep_km.size() + il]
    std::vector<std::uint8_t> boundary;   // lowest beating eta_c per column
    std::vector<double> threshold_eta_c;  // per column, NaN when never beaten
    double min_threshold_eta_c = 0.0;     // NaN when the region is empty
    double max_coupling_loss = 0.0;       // 1 - min threshold
    double best_sep_km = 0.0;             // column attaining the min threshold
    bool monotone_in_eta_c = true;
    bool empty = true;

    std::size_t index(std::size_t ie, std::size_t il) const {
        return ie * sep_km.size() + il;
    }
};

// Beat map over an (eta_c, L) grid: the asymptotic condition for
// number-eigenspace codes; for the single-mode code, existence of a segment
// count n <= n_ceiling whose chain rate exceeds the bound at distance n*L.
// Column thresholds are refined by bisection in eta_c.
RegionResult region_scan(const CodeSpec& code, const GridSpec& eta_c_grid,
                         const GridSpec& sep_grid, const RegionOptions& opts = {});

struct SeparationPolicy {
    bool optimize = false;
    double fixed_km = 1.0;
};

// Separation maximizing the per-segment advantage p_s(eta_c*eta_s)/eta_s by
// golden-section search over [0.1, 50] km, abs tol 0.01, ties toward the
// smaller L. Number-eigenspace codes only (throws std::domain_error).
double optimal_separation(const CodeSpec& code, double eta_c, double alpha = 0.2);

struct RatePoint {
    double x_km = 0.0;
    int n = 0;
    double sep_km = 0.0;
    double rate = 0.0;
    double bound = 0.0;
};

struct RateCurve {
    std::vector<RatePoint> points;
    double sep_km = 0.0;
    bool per_mode = true;
};

RateCurve rate_vs_distance(const CodeSpec& code, double eta_c, double alpha, double x_max_km,
                           const SeparationPolicy& policy, bool per_mode = true);

// Smallest sampled distance where the chain rate exceeds the bound.
std::optional<double> first_beat_distance(const RateCurve& curve);

}  // namespace qrep
