#include "qrep/repeater.hpp"

#include <cmath>
#include <stdexcept>

namespace qrep {

namespace {

constexpr double inv_sqrt2 = 0.7071067811865475244;

Vec joint_product(const Vec& sys, std::size_t anc_dim, std::size_t anc_index, cxd amp) {
    Vec v(sys.n * anc_dim);
    for (std::size_t s = 0; s < sys.n; ++s) v[s * anc_dim + anc_index] = amp * sys[s];
    return v;
}

void add_joint(Vec& v, const Vec& sys, std::size_t anc_dim, std::size_t anc_index, cxd amp) {
    for (std::size_t s = 0; s < sys.n; ++s) v[s * anc_dim + anc_index] += amp * sys[s];
}

void normalized_pair(Rng& rng, cxd& c0, cxd& c1) {
    c0 = rng.gaussian_cxd();
    c1 = rng.gaussian_cxd();
    const double nn = std::sqrt(std::norm(c0) + std::norm(c1));
    c0 /= nn;
    c1 /= nn;
}

}  // namespace

std::size_t AncillaBasis::index_of(int k, int i) const {
    if (kind != RepeaterKind::direct)
        throw std::logic_error("labelled ancilla indices exist only for the direct kind");
    if (k < 0 || k >= k_states || i < 0 || i > modes)
        throw std::out_of_range("ancilla label out of range");
    return static_cast<std::size_t>(k) * (modes + 1) + i;
}

RepeaterSpec build_direct(const CodeSpec& code, int k_states) {
    if (k_states < 1) throw std::invalid_argument("direct repeater needs K >= 1 ancilla states");
    RepeaterSpec spec;
    spec.code = code;
    spec.spaces = error_spaces(code);
    const int m = code.basis.modes;
    spec.ancilla = {RepeaterKind::direct, k_states, m,
                    static_cast<std::size_t>(k_states) * (m + 1)};
    const std::size_t jd = code.basis.dim * spec.ancilla.dim;

    Mat h(jd);
    const std::array<const Vec*, 2> words{&code.logical0, &code.logical1};
    for (int k = 0; k < k_states; ++k)
        for (int i = 1; i <= m; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec psi = joint_product(*words[j], spec.ancilla.dim,
                                        spec.ancilla.index_of(k, i), inv_sqrt2);
                add_joint(psi, spec.spaces.images[i - 1][j], spec.ancilla.dim,
                          spec.ancilla.index_of(k, 0), -inv_sqrt2);
                add_scaled(h, 1.0, outer(psi, psi));
                ++spec.projector_rank;
            }
    spec.unitary = unitary_from_projector(h);
    spec.hamiltonian = std::move(h);
    return spec;
}

RepeaterSpec build_swap(const CodeSpec& code) {
    RepeaterSpec spec;
    spec.code = code;
    spec.spaces = error_spaces(code);
    const int m = code.basis.modes;
    spec.ancilla = {RepeaterKind::swap, 1, m, 2};
    const std::size_t jd = code.basis.dim * 2;

    Mat h(jd);
    for (int i = 0; i <= m; ++i) {
        const Vec& img0 = i == 0 ? code.logical0 : spec.spaces.images[i - 1][0];
        const Vec& img1 = i == 0 ? code.logical1 : spec.spaces.images[i - 1][1];
        Vec phi = joint_product(img0, 2, 1, inv_sqrt2);
        add_joint(phi, img1, 2, 0, -inv_sqrt2);
        add_scaled(h, 1.0, outer(phi, phi));
        ++spec.projector_rank;
    }
    spec.unitary = unitary_from_projector(h);
    spec.hamiltonian = std::move(h);
    return spec;
}

Mat unitary_from_projector(const Mat& h, double tol) {
    const double idem = max_abs_diff(mul(h, h), h);
    if (idem > tol)
        throw std::invalid_argument("unitary_from_projector: H*H deviates from H by " +
                                    std::to_string(idem));
    Mat u = Mat::identity(h.n);
    add_scaled(u, -2.0, h);
    return u;
}

double verify_transfer_action(const RepeaterSpec& spec, int trials, std::uint64_t seed) {
    if (spec.ancilla.kind != RepeaterKind::direct)
        throw std::invalid_argument("verify_transfer_action needs a direct-kind spec");
    Rng rng(seed);
    const std::size_t ad = spec.ancilla.dim;
    const auto& anc = spec.ancilla;
    const std::array<const Vec*, 2> words{&spec.code.logical0, &spec.code.logical1};
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        cxd a, b;
        normalized_pair(rng, a, b);
        std::vector<cxd> gamma(anc.k_states);
        double nn = 0.0;
        for (auto& g : gamma) {
            g = rng.gaussian_cxd();
            nn += std::norm(g);
        }
        nn = std::sqrt(nn);
        for (auto& g : gamma) g /= nn;

        for (int i = 1; i <= anc.modes; ++i) {
            Vec in(spec.code.basis.dim * ad), want(spec.code.basis.dim * ad);
            for (int k = 0; k < anc.k_states; ++k) {
                add_joint(in, spec.spaces.images[i - 1][0], ad, anc.index_of(k, 0), a * gamma[k]);
                add_joint(in, spec.spaces.images[i - 1][1], ad, anc.index_of(k, 0), b * gamma[k]);
                add_joint(want, *words[0], ad, anc.index_of(k, i), a * gamma[k]);
                add_joint(want, *words[1], ad, anc.index_of(k, i), b * gamma[k]);
            }
            worst = std::max(worst, max_abs_diff(matvec(spec.unitary, in), want));
        }
        // no error: code-space system with a fresh ancilla is untouched
        Vec in(spec.code.basis.dim * ad);
        for (int k = 0; k < anc.k_states; ++k) {
            add_joint(in, *words[0], ad, anc.index_of(k, 0), a * gamma[k]);
            add_joint(in, *words[1], ad, anc.index_of(k, 0), b * gamma[k]);
        }
        worst = std::max(worst, max_abs_diff(matvec(spec.unitary, in), in));
    }
    return worst;
}

double verify_swap_action(const RepeaterSpec& spec, int trials, std::uint64_t seed) {
    if (spec.ancilla.kind != RepeaterKind::swap)
        throw std::invalid_argument("verify_swap_action needs a swap-kind spec");
    Rng rng(seed);
    const std::array<const Vec*, 2> words{&spec.code.logical0, &spec.code.logical1};
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        cxd a, b, g0, g1;
        normalized_pair(rng, a, b);
        normalized_pair(rng, g0, g1);
        for (int i = 0; i <= spec.ancilla.modes; ++i) {
            const Vec& img0 = i == 0 ? *words[0] : spec.spaces.images[i - 1][0];
            const Vec& img1 = i == 0 ? *words[1] : spec.spaces.images[i - 1][1];
            Vec in(spec.code.basis.dim * 2), want(spec.code.basis.dim * 2);
            add_joint(in, img0, 2, 0, a * g0);
            add_joint(in, img0, 2, 1, a * g1);
            add_joint(in, img1, 2, 0, b * g0);
            add_joint(in, img1, 2, 1, b * g1);
            add_joint(want, img0, 2, 0, g0 * a);
            add_joint(want, img0, 2, 1, g0 * b);
            add_joint(want, img1, 2, 0, g1 * a);
            add_joint(want, img1, 2, 1, g1 * b);
            worst = std::max(worst, max_abs_diff(matvec(spec.unitary, in), want));
        }
    }
    return worst;
}

double RecoveryChannel::completeness_residual() const {
    Mat sum(dim);
    for (std::size_t i = 0; i < kraus.size(); ++i) mul_acc(sum, kraus_dag[i], kraus[i]);
    return max_abs_diff(sum, Mat::identity(dim));
}

RecoveryChannel recovery_channel(const CodeSpec& code) {
    const ErrorSpaces es = error_spaces(code);
    RecoveryChannel rec;
    rec.dim = code.basis.dim;
    Mat r0 = Mat::identity(rec.dim);
    for (const auto& p : es.projectors) add_scaled(r0, -1.0, p);
    rec.kraus.push_back(std::move(r0));
    for (const auto& img : es.images) {
        Mat r = outer(code.logical0, img[0]);
        add_scaled(r, 1.0, outer(code.logical1, img[1]));
        rec.kraus.push_back(std::move(r));
    }
    for (const auto& k : rec.kraus) rec.kraus_dag.push_back(dagger(k));
    return rec;
}

Mat apply_recovery(const RecoveryChannel& rec, const Mat& rho) {
    if (rho.n != rec.dim) throw std::invalid_argument("apply_recovery: dimension mismatch");
    Mat out(rho.n), tmp(rho.n);
    for (std::size_t i = 0; i < rec.kraus.size(); ++i) {
        std::fill(tmp.a.begin(), tmp.a.end(), cxd{});
        mul_acc(tmp, rec.kraus[i], rho);
        mul_acc(out, tmp, rec.kraus_dag[i]);
    }
    return out;
}

double recovery_direct_consistency(const RepeaterSpec& spec, const RecoveryChannel& rec,
                                   int trials, std::uint64_t seed) {
    if (spec.ancilla.kind != RepeaterKind::direct)
        throw std::invalid_argument("recovery_direct_consistency needs a direct-kind spec");
    Rng rng(seed);
    const std::size_t sd = spec.code.basis.dim;
    const std::size_t ad = spec.ancilla.dim;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Mat rho = random_density(sd, rng);
        const int k = t % spec.ancilla.k_states;
        Mat anc(ad);
        anc(spec.ancilla.index_of(k, 0), spec.ancilla.index_of(k, 0)) = 1.0;
        const Mat joint = kron(rho, anc);
        const Mat evolved = mul(mul(spec.unitary, joint), dagger(spec.unitary));
        const Mat traced = partial_trace_back(evolved, sd, ad);
        worst = std::max(worst, max_abs_diff(traced, apply_recovery(rec, rho)));
    }
    return worst;
}

double recovery_swap_consistency(const RepeaterSpec& spec, const RecoveryChannel& rec,
                                 int trials, std::uint64_t seed) {
    if (spec.ancilla.kind != RepeaterKind::swap)
        throw std::invalid_argument("recovery_swap_consistency needs a swap-kind spec");
    Rng rng(seed);
    const std::size_t sd = spec.code.basis.dim;

    // Orthonormal basis of the correctable span: codewords then images.
    std::vector<const Vec*> span{&spec.code.logical0, &spec.code.logical1};
    for (const auto& img : spec.spaces.images) {
        span.push_back(&img[0]);
        span.push_back(&img[1]);
    }
    const std::size_t spand = span.size();

    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        // Random density supported on the span.
        const Mat small = random_density(spand, rng);
        Mat rho(sd);
        for (std::size_t p = 0; p < spand; ++p)
            for (std::size_t q = 0; q < spand; ++q) {
                const cxd w = small(p, q);
                if (w != cxd{}) add_scaled(rho, w, outer(*span[p], *span[q]));
            }
        cxd g0, g1;
        normalized_pair(rng, g0, g1);
        Mat anc(2);
        anc(0, 0) = g0 * std::conj(g0);
        anc(0, 1) = g0 * std::conj(g1);
        anc(1, 0) = g1 * std::conj(g0);
        anc(1, 1) = g1 * std::conj(g1);
        const Mat joint = kron(rho, anc);
        const Mat evolved = mul(mul(spec.unitary, joint), dagger(spec.unitary));
        const Mat qubit = partial_trace_front(evolved, sd, 2);
        // Re-embed the recovered qubit through the codewords.
        Mat embedded(sd);
        const std::array<const Vec*, 2> words{&spec.code.logical0, &spec.code.logical1};
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                add_scaled(embedded, qubit(p, q), outer(*words[p], *words[q]));
        worst = std::max(worst, max_abs_diff(embedded, apply_recovery(rec, rho)));
    }
    return worst;
}

}  // namespace qrep
