#include "qrep/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qrep {

namespace {

constexpr double ln2 = 0.6931471805599453094;
const double nan_d = std::numeric_limits<double>::quiet_NaN();

double entropy_bits(const std::array<double, 4>& lambda) {
    double h = 0.0;
    for (double l : lambda) {
        if (l <= 0.0) continue;  // clamp rounding negatives; 0 log 0 = 0
        h -= l * std::log2(l);
    }
    return h;
}

// Chain rate of the single-mode code after n segments, advanced incrementally
// through the closed-form map (sn = survival^n, cn = coherence^n).
double single_mode_rate_from_powers(double sn, double cn) {
    const std::array<double, 4> lambda{0.25 * (1.0 + sn) + 0.5 * cn,
                                       0.25 * (1.0 + sn) - 0.5 * cn,
                                       0.25 * (1.0 - sn), 0.25 * (1.0 - sn)};
    return std::max(0.0, 1.0 - entropy_bits(lambda));
}

bool single_mode_beat_exists(double eta_c, double sep_km, const RegionOptions& opts) {
    const double eta_seg = std::pow(10.0, -opts.alpha * sep_km / 10.0);
    const double eta = eta_c * eta_seg;
    const SingleModeCoeffs k = single_mode_coeffs(eta);
    double sn = 1.0, cn = 1.0;
    for (int n = 1; n <= opts.n_ceiling; ++n) {
        sn *= k.survival;
        cn *= k.coherence;
        const double rate = single_mode_rate_from_powers(sn, cn);
        if (rate <= opts.rate_floor) return false;  // monotone non-increasing in n
        if (rate > repeaterless_bound_km(n * sep_km, opts.alpha)) return true;
    }
    return false;
}

}  // namespace

double SegmentModel::eta_s() const { return std::pow(10.0, -alpha * sep_km / 10.0); }
double SegmentModel::eta() const { return eta_c * eta_s(); }

void SegmentModel::validate() const {
    if (!(eta_c > 0.0) || eta_c > 1.0)
        throw std::invalid_argument("coupling efficiency must lie in (0, 1]");
    if (!(sep_km > 0.0)) throw std::invalid_argument("repeater separation must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("fibre attenuation must be non-negative");
    code.validate();
}

double repeaterless_bound(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("repeaterless_bound: eta must lie in (0, 1]");
    if (eta == 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-eta) / ln2;
}

double repeaterless_bound_km(double x_km, double alpha) {
    if (!(x_km > 0.0)) throw std::invalid_argument("repeaterless_bound_km: distance must be positive");
    return repeaterless_bound(std::pow(10.0, -alpha * x_km / 10.0));
}

double success_probability(const CodeSpec& code, double eta) {
    const auto n = number_eigenspace_photon(code);
    if (!n)
        throw std::domain_error("code '" + code.name +
                                "' is not confined to a photon-number eigenspace; "
                                "no closed-form success probability exists");
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("success_probability: eta must lie in (0, 1]");
    if (eta == 1.0) return 1.0;
    double p = std::pow(eta, *n);
    for (double c : error_probabilities(code, eta)) p += c;
    return p;
}

bool asymptotic_beat(const CodeSpec& code, double eta_c, double sep_km, double alpha) {
    SegmentModel m{code, eta_c, sep_km, alpha};
    m.validate();
    return success_probability(code, m.eta()) > m.eta_s();
}

SegmentChannel segment_channel(const SegmentModel& model) {
    model.validate();
    return {build_loss_channel(model.code.basis, model.eta()), recovery_channel(model.code)};
}

Mat apply_segment(const SegmentChannel& seg, const Mat& rho) {
    return apply_recovery(seg.recovery, apply_channel(seg.loss, rho));
}

Mat apply_segment_back(const SegmentChannel& seg, const Mat& joint, std::size_t dim_front) {
    const std::size_t d = seg.loss.dim;
    if (joint.n != dim_front * d)
        throw std::invalid_argument("apply_segment_back: dimension mismatch");
    Mat out(joint.n);
    Mat block(d);
    for (std::size_t fa = 0; fa < dim_front; ++fa)
        for (std::size_t fb = 0; fb < dim_front; ++fb) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    block(i, j) = joint(fa * d + i, fb * d + j);
            const Mat mapped = apply_segment(seg, block);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    out(fa * d + i, fb * d + j) = mapped(i, j);
        }
    return out;
}

ChainState initial_chain_state(const CodeSpec& code) {
    code.validate();
    const std::size_t sd = code.basis.dim;
    Vec psi(2 * sd);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (std::size_t s = 0; s < sd; ++s) {
        psi[s] = r2 * code.logical0[s];
        psi[sd + s] = r2 * code.logical1[s];
    }
    return {code.basis, outer(psi, psi), 0};
}

void advance_chain(ChainState& state, const SegmentChannel& seg, int steps) {
    for (int i = 0; i < steps; ++i) {
        state.joint = apply_segment_back(seg, state.joint, 2);
        ++state.segments;
    }
}

ConditionedState condition_on_code(const ChainState& state, const CodeSpec& code) {
    if (code.basis != state.system)
        throw std::invalid_argument("condition_on_code: basis mismatch");
    const std::size_t sd = code.basis.dim;
    const std::array<const Vec*, 2> words{&code.logical0, &code.logical1};
    Mat t(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) {
                    cxd v{};
                    for (std::size_t s = 0; s < sd; ++s) {
                        const cxd wp = std::conj((*words[p])[s]);
                        if (wp == cxd{}) continue;
                        for (std::size_t s2 = 0; s2 < sd; ++s2)
                            v += wp * state.joint(a * sd + s, b * sd + s2) * (*words[q])[s2];
                    }
                    t(a * 2 + p, b * 2 + q) = v;
                }
    const double p_in = trace(t).real();
    if (p_in < 1e-300) throw std::runtime_error("condition_on_code: no code-space weight left");
    scale(t, 1.0 / p_in);
    return {std::move(t), p_in};
}

std::array<double, 4> bell_diagonal(const Mat& two_qubit) {
    if (two_qubit.n != 4) throw std::invalid_argument("bell_diagonal: need a 4x4 state");
    const auto& r = two_qubit;
    const double phi_common = 0.5 * (r(0, 0) + r(3, 3)).real();
    const double phi_cross = r(0, 3).real();
    const double psi_common = 0.5 * (r(1, 1) + r(2, 2)).real();
    const double psi_cross = r(1, 2).real();
    return {phi_common + phi_cross, phi_common - phi_cross,
            psi_common + psi_cross, psi_common - psi_cross};
}

double six_state_rate(const Mat& two_qubit) {
    return std::max(0.0, 1.0 - entropy_bits(bell_diagonal(two_qubit)));
}

double chain_rate_per_mode(const SegmentModel& model, int n, bool per_mode) {
    model.validate();
    if (n < 1) throw std::invalid_argument("chain_rate_per_mode: need n >= 1");
    const double m = per_mode ? model.code.basis.modes : 1.0;
    if (number_eigenspace_photon(model.code)) {
        const double p = success_probability(model.code, model.eta());
        return std::pow(p, n) / m;
    }
    ChainState state = initial_chain_state(model.code);
    const SegmentChannel seg = segment_channel(model);
    advance_chain(state, seg, n);
    const ConditionedState cond = condition_on_code(state, model.code);
    return cond.p_in * six_state_rate(cond.two_qubit) / m;
}

SingleModeCoeffs single_mode_coeffs(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("single_mode_coeffs: eta must lie in (0, 1]");
    return {3.0 * eta * eta - 2.0 * eta * eta * eta,
            eta * eta + (1.0 - eta) * std::sqrt(3.0) * eta};
}

Mat single_mode_two_qubit(double eta, int n) {
    if (n < 0) throw std::invalid_argument("single_mode_two_qubit: need n >= 0");
    const SingleModeCoeffs k = single_mode_coeffs(eta);
    const double sn = std::pow(k.survival, n);
    const double cn = std::pow(k.coherence, n);
    Mat r(4);
    r(0, 0) = 0.5;
    r(3, 3) = 0.5 * sn;
    r(0, 3) = r(3, 0) = 0.5 * cn;
    r(2, 2) = 0.5 * (1.0 - sn);
    return r;
}

double single_mode_rate(double eta, int n) {
    const SingleModeCoeffs k = single_mode_coeffs(eta);
    return single_mode_rate_from_powers(std::pow(k.survival, n), std::pow(k.coherence, n));
}

std::vector<double> GridSpec::values() const {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad grid (need lo <= hi, step > 0)");
    std::vector<double> v;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = lo + i * step;
        if (x > hi + step * 0.5) break;
        v.push_back(x);
    }
    return v;
}

RegionResult region_scan(const CodeSpec& code, const GridSpec& eta_c_grid,
                         const GridSpec& sep_grid, const RegionOptions& opts) {
    code.validate();
    RegionResult res;
    res.eta_c = eta_c_grid.values();
    res.sep_km = sep_grid.values();
    if (res.eta_c.empty() || res.sep_km.empty())
        throw std::invalid_argument("region_scan: empty grid");
    const std::size_t ne = res.eta_c.size();
    const std::size_t nl = res.sep_km.size();
    res.beats.assign(ne * nl, 0);
    res.boundary.assign(ne * nl, 0);
    res.threshold_eta_c.assign(nl, nan_d);

    const bool closed_form = number_eigenspace_photon(code).has_value();
    auto beat_at = [&](double ec, double sep) {
        if (ec > 1.0) ec = 1.0;  // guard rounding at the grid's top edge
        return closed_form ? asymptotic_beat(code, ec, sep, opts.alpha)
                           : single_mode_beat_exists(ec, sep, opts);
    };

    auto scan_column = [&](std::size_t il) {
        const double sep = res.sep_km[il];
        std::size_t first_beat = ne;
        for (std::size_t ie = 0; ie < ne; ++ie) {
            const bool b = beat_at(res.eta_c[ie], sep);
            res.beats[res.index(ie, il)] = b ? 1 : 0;
            if (b && first_beat == ne) first_beat = ie;
        }
        if (first_beat == ne) return;
        res.boundary[res.index(first_beat, il)] = 1;
        if (first_beat == 0) {
            res.threshold_eta_c[il] = res.eta_c[0];
            return;
        }
        double lo = res.eta_c[first_beat - 1], hi = res.eta_c[first_beat];
        while (hi - lo > opts.refine_tol) {
            const double mid = 0.5 * (lo + hi);
            (beat_at(mid, sep) ? hi : lo) = mid;
        }
        res.threshold_eta_c[il] = hi;
    };

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (std::size_t il = 0; il < nl; ++il) scan_column(il);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t il = w; il < nl; il += jobs) scan_column(il);
            });
        for (auto& th : pool) th.join();
    }

    res.min_threshold_eta_c = nan_d;
    for (std::size_t il = 0; il < nl; ++il) {
        const double t = res.threshold_eta_c[il];
        if (std::isnan(t)) continue;
        if (std::isnan(res.min_threshold_eta_c) || t < res.min_threshold_eta_c) {
            res.min_threshold_eta_c = t;
            res.best_sep_km = res.sep_km[il];
        }
    }
    res.empty = std::isnan(res.min_threshold_eta_c);
    res.max_coupling_loss = res.empty ? nan_d : 1.0 - res.min_threshold_eta_c;

    res.monotone_in_eta_c = true;
    for (std::size_t il = 0; il < nl && res.monotone_in_eta_c; ++il)
        for (std::size_t ie = 1; ie < ne; ++ie)
            if (res.beats[res.index(ie - 1, il)] && !res.beats[res.index(ie, il)]) {
                res.monotone_in_eta_c = false;
                break;
            }
    return res;
}

double optimal_separation(const CodeSpec& code, double eta_c, double alpha) {
    if (!number_eigenspace_photon(code))
        throw std::domain_error("optimal_separation: code '" + code.name +
                                "' has no closed-form success probability to optimize");
    if (!(eta_c > 0.0) || eta_c > 1.0)
        throw std::invalid_argument("optimal_separation: eta_c must lie in (0, 1]");
    auto advantage = [&](double sep) {
        const double es = std::pow(10.0, -alpha * sep / 10.0);
        return success_probability(code, eta_c * es) / es;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.1, b = 50.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = advantage(c), fd = advantage(d);
    while (b - a > 0.01) {
        if (fc >= fd) {  // ties keep the left interval: prefer smaller L
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = advantage(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = advantage(d);
        }
    }
    return 0.5 * (a + b);
}

RateCurve rate_vs_distance(const CodeSpec& code, double eta_c, double alpha, double x_max_km,
                           const SeparationPolicy& policy, bool per_mode) {
    if (!(x_max_km > 0.0)) throw std::invalid_argument("rate_vs_distance: need x_max > 0");
    RateCurve curve;
    curve.per_mode = per_mode;
    curve.sep_km = policy.optimize ? optimal_separation(code, eta_c, alpha) : policy.fixed_km;
    SegmentModel model{code, eta_c, curve.sep_km, alpha};
    model.validate();
    const double m = per_mode ? code.basis.modes : 1.0;
    const int n_max = static_cast<int>(std::floor(x_max_km / curve.sep_km + 1e-9));

    const bool closed_form = number_eigenspace_photon(code).has_value();
    double p = 0.0;
    SingleModeCoeffs k{};
    if (closed_form)
        p = success_probability(code, model.eta());
    else
        k = single_mode_coeffs(model.eta());

    double pn = 1.0, sn = 1.0, cn = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        RatePoint pt;
        pt.n = n;
        pt.sep_km = curve.sep_km;
        pt.x_km = n * curve.sep_km;
        if (closed_form) {
            pn *= p;
            pt.rate = pn / m;
        } else {
            sn *= k.survival;
            cn *= k.coherence;
            pt.rate = single_mode_rate_from_powers(sn, cn) / m;
        }
        pt.bound = repeaterless_bound_km(pt.x_km, alpha);
        curve.points.push_back(pt);
    }
    return curve;
}

std::optional<double> first_beat_distance(const RateCurve& curve) {
    for (const auto& pt : curve.points)
        if (pt.rate > pt.bound) return pt.x_km;
    return std::nullopt;
}

}  // namespace qrep
