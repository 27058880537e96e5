#include "qrep/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace qrep {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("transmissivity eta must lie in (0, 1]");
}

}  // namespace

KrausOp make_kraus(Mat m, std::vector<int> label) {
    KrausOp op;
    op.m_dag = dagger(m);
    op.label = std::move(label);
    const std::size_t n = m.n;
    op.target.assign(n, -1);
    op.coeff.assign(n, cxd{});
    op.monomial = true;
    for (std::size_t col = 0; col < n && op.monomial; ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            const cxd v = m(row, col);
            if (v == cxd{}) continue;
            if (op.target[col] != -1) {
                op.monomial = false;
                break;
            }
            op.target[col] = static_cast<std::ptrdiff_t>(row);
            op.coeff[col] = v;
        }
    }
    if (!op.monomial) {
        op.target.clear();
        op.coeff.clear();
    }
    op.m = std::move(m);
    return op;
}

double KrausChannel::completeness_residual() const {
    Mat sum(dim);
    for (const auto& op : ops) mul_acc(sum, op.m_dag, op.m);
    return max_abs_diff(sum, Mat::identity(dim));
}

KrausChannel build_loss_channel(const FockBasis& basis, double eta) {
    check_eta(eta);
    KrausChannel ch;
    ch.dim = basis.dim;
    const int c1 = basis.cutoff + 1;
    std::size_t count = 1;
    for (int i = 0; i < basis.modes; ++i) count *= static_cast<std::size_t>(c1);
    ch.ops.reserve(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
        // loss pattern k, lexicographic, k_0 slowest (same layout as the basis)
        std::vector<int> k(basis.modes);
        std::size_t rest = flat;
        for (int i = basis.modes - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rest % c1);
            rest /= static_cast<std::size_t>(c1);
        }
        Mat m(basis.dim);
        for (std::size_t col = 0; col < basis.dim; ++col) {
            const auto occ = basis.occupation_of(col);
            double amp2 = 1.0;
            bool ok = true;
            for (int i = 0; i < basis.modes; ++i) {
                if (k[i] > occ[i]) {
                    ok = false;
                    break;
                }
                amp2 *= binomial(occ[i], k[i]) * std::pow(1.0 - eta, k[i]) *
                        std::pow(eta, occ[i] - k[i]);
            }
            if (!ok || amp2 == 0.0) continue;
            std::vector<int> img = occ;
            for (int i = 0; i < basis.modes; ++i) img[i] -= k[i];
            m(basis.index_of(img), col) = std::sqrt(amp2);
        }
        ch.ops.push_back(make_kraus(std::move(m), k));
    }
    return ch;
}

Mat apply_channel(const KrausChannel& ch, const Mat& rho, bool force_dense) {
    if (rho.n != ch.dim) throw std::invalid_argument("apply_channel: dimension mismatch");
    Mat out(rho.n);
    Mat tmp(rho.n);
    for (const auto& op : ch.ops) {
        if (op.monomial && !force_dense) {
            for (std::size_t r = 0; r < rho.n; ++r) {
                if (op.target[r] < 0) continue;
                const std::size_t tr = static_cast<std::size_t>(op.target[r]);
                const cxd cr = op.coeff[r];
                for (std::size_t c = 0; c < rho.n; ++c) {
                    if (op.target[c] < 0) continue;
                    out(tr, static_cast<std::size_t>(op.target[c])) +=
                        cr * std::conj(op.coeff[c]) * rho(r, c);
                }
            }
        } else {
            std::fill(tmp.a.begin(), tmp.a.end(), cxd{});
            mul_acc(tmp, op.m, rho);
            mul_acc(out, tmp, op.m_dag);
        }
    }
    return out;
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
    return {rho.basis, apply_channel(ch, rho.m)};
}

Mat apply_channel_back(const KrausChannel& ch, const Mat& joint, std::size_t dim_front) {
    const std::size_t d = ch.dim;
    if (joint.n != dim_front * d)
        throw std::invalid_argument("apply_channel_back: dimension mismatch");
    Mat out(joint.n);
    Mat block(d), mapped(d);
    for (std::size_t fa = 0; fa < dim_front; ++fa)
        for (std::size_t fb = 0; fb < dim_front; ++fb) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    block(i, j) = joint(fa * d + i, fb * d + j);
            mapped = apply_channel(ch, block);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    out(fa * d + i, fb * d + j) = mapped(i, j);
        }
    return out;
}

Mat stinespring_loss(const FockBasis& basis, const Mat& rho, double eta, int env_cutoff) {
    check_eta(eta);
    if (rho.n != basis.dim) throw std::invalid_argument("stinespring_loss: dimension mismatch");
    if (env_cutoff < 0) env_cutoff = basis.cutoff;
    if (env_cutoff < basis.cutoff)
        throw std::invalid_argument(
            "stinespring_loss: environment cutoff cannot hold all transferred photons");
    const double phi = std::acos(std::sqrt(eta));
    const int ec1 = env_cutoff + 1;

    // Pair-space beamsplitter, system slowest: U = exp[i phi (a†b + a b†)].
    const FockBasis pair(2, std::max(basis.cutoff, env_cutoff));
    const Operator a = annihilation(pair, 0);
    const Operator b = annihilation(pair, 1);
    Mat gen = mul(dagger(a.m), b.m);
    add_scaled(gen, 1.0, mul(dagger(b.m), a.m));
    const Mat u_pair_full = expm_i_hermitian(gen, phi);
    // Restrict rows/cols to system occupation <= basis.cutoff, env <= env_cutoff.
    const int pc1 = pair.cutoff + 1;
    const std::size_t pair_dim = static_cast<std::size_t>(basis.cutoff + 1) * ec1;
    Mat u_pair(pair_dim);
    for (int s1 = 0; s1 <= basis.cutoff; ++s1)
        for (int e1 = 0; e1 < ec1; ++e1)
            for (int s2 = 0; s2 <= basis.cutoff; ++s2)
                for (int e2 = 0; e2 < ec1; ++e2)
                    u_pair(static_cast<std::size_t>(s1) * ec1 + e1,
                           static_cast<std::size_t>(s2) * ec1 + e2) =
                        u_pair_full(static_cast<std::size_t>(s1) * pc1 + e1,
                                    static_cast<std::size_t>(s2) * pc1 + e2);

    Mat current = rho;
    const std::size_t dim = basis.dim;
    for (int mode = 0; mode < basis.modes; ++mode) {
        // rho_joint = rho (x) |0><0|_env with env as the fastest index
        const std::size_t jd = dim * ec1;
        Mat joint(jd);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                joint(i * ec1, j * ec1) = current(i, j);
        // Embed the pair unitary on (mode, env).
        Mat u(jd);
        const std::size_t stride = basis.stride(mode);
        for (std::size_t sys = 0; sys < dim; ++sys) {
            const int n_sys = basis.occupation_of(sys, mode);
            const std::size_t sys_rest = sys - static_cast<std::size_t>(n_sys) * stride;
            for (int e1 = 0; e1 < ec1; ++e1)
                for (int n2 = 0; n2 <= basis.cutoff; ++n2)
                    for (int e2 = 0; e2 < ec1; ++e2) {
                        const cxd v = u_pair(static_cast<std::size_t>(n_sys) * ec1 + e1,
                                             static_cast<std::size_t>(n2) * ec1 + e2);
                        if (v == cxd{}) continue;
                        const std::size_t row = sys * ec1 + e1;
                        const std::size_t col =
                            (sys_rest + static_cast<std::size_t>(n2) * stride) * ec1 + e2;
                        u(row, col) = v;
                    }
        }
        const Mat evolved = mul(mul(u, joint), dagger(u));
        current = partial_trace_back(evolved, dim, ec1);
    }
    return current;
}

namespace {

// RHS of the loss master equation via occupation stencils; O(dim^2).
void lindblad_rhs(const FockBasis& basis, double gamma, const Mat& rho, Mat& out,
                  const std::vector<int>& totals) {
    const std::size_t dim = basis.dim;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            out(r, c) = -0.5 * gamma * static_cast<double>(totals[r] + totals[c]) * rho(r, c);
    for (int mode = 0; mode < basis.modes; ++mode) {
        const std::size_t s = basis.stride(mode);
        for (std::size_t r = 0; r < dim; ++r) {
            const int nr = basis.occupation_of(r, mode);
            if (nr == basis.cutoff) continue;
            for (std::size_t c = 0; c < dim; ++c) {
                const int nc = basis.occupation_of(c, mode);
                if (nc == basis.cutoff) continue;
                out(r, c) += gamma *
                             std::sqrt(static_cast<double>((nr + 1) * (nc + 1))) *
                             rho(r + s, c + s);
            }
        }
    }
}

Mat lindblad_run(const FockBasis& basis, Mat rho, double gamma, double time, double h) {
    const std::size_t steps = static_cast<std::size_t>(std::ceil(time / h - 1e-12));
    const double dt = time / static_cast<double>(steps ? steps : 1);
    std::vector<int> totals(basis.dim);
    for (std::size_t i = 0; i < basis.dim; ++i) totals[i] = basis.total_photons(i);

    Mat k1(basis.dim), k2(basis.dim), k3(basis.dim), k4(basis.dim), tmp(basis.dim);
    for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s) {
        lindblad_rhs(basis, gamma, rho, k1, totals);
        tmp = rho;
        add_scaled(tmp, 0.5 * dt, k1);
        lindblad_rhs(basis, gamma, tmp, k2, totals);
        tmp = rho;
        add_scaled(tmp, 0.5 * dt, k2);
        lindblad_rhs(basis, gamma, tmp, k3, totals);
        tmp = rho;
        add_scaled(tmp, dt, k3);
        lindblad_rhs(basis, gamma, tmp, k4, totals);
        add_scaled(rho, dt / 6.0, k1);
        add_scaled(rho, dt / 3.0, k2);
        add_scaled(rho, dt / 3.0, k3);
        add_scaled(rho, dt / 6.0, k4);
    }
    return rho;
}

}  // namespace

Mat lindblad_evolve(const FockBasis& basis, const Mat& rho, const LindbladParams& p) {
    if (rho.n != basis.dim) throw std::invalid_argument("lindblad_evolve: dimension mismatch");
    if (p.gamma <= 0.0) throw std::invalid_argument("lindblad_evolve: gamma must be positive");
    if (p.time < 0.0) throw std::invalid_argument("lindblad_evolve: negative time");
    if (p.gamma_step <= 0.0) throw std::invalid_argument("lindblad_evolve: bad step");
    if (p.time == 0.0) return rho;
    const double h = p.gamma_step / p.gamma;
    Mat full = lindblad_run(basis, rho, p.gamma, p.time, h);
    if (p.self_check) {
        const Mat half = lindblad_run(basis, rho, p.gamma, p.time, 0.5 * h);
        const double diff = max_abs_diff(full, half);
        if (diff > p.self_check_tol)
            throw std::runtime_error("lindblad_evolve: step too large, halving moved entries by " +
                                     std::to_string(diff));
    }
    return full;
}

ChannelAgreement representation_equivalence_report(const FockBasis& basis, double eta,
                                                   int states, std::uint64_t seed) {
    check_eta(eta);
    if (states < 1) throw std::invalid_argument("need at least one probe state");
    const KrausChannel ch = build_loss_channel(basis, eta);
    ChannelAgreement rep;
    rep.eta = eta;
    rep.states = states;
    rep.seed = seed;
    rep.completeness = ch.completeness_residual();
    LindbladParams lp;
    lp.gamma = 1.0;
    lp.time = -std::log(eta);
    lp.self_check = true;
    Rng rng(seed);
    for (int s = 0; s < states; ++s) {
        const Mat rho = random_density(basis.dim, rng);
        const Mat via_kraus = apply_channel(ch, rho);
        const Mat via_stine = stinespring_loss(basis, rho, eta);
        rep.kraus_vs_stinespring =
            std::max(rep.kraus_vs_stinespring, max_abs_diff(via_kraus, via_stine));
        if (eta < 1.0) {
            const Mat via_lindblad = lindblad_evolve(basis, rho, lp);
            rep.kraus_vs_lindblad =
                std::max(rep.kraus_vs_lindblad, max_abs_diff(via_kraus, via_lindblad));
        }
    }
    return rep;
}

}  // namespace qrep
