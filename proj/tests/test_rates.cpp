#include "qrep/rates.hpp"

#include "doctest.h"

#include <cmath>

using namespace qrep;

namespace {

Mat bell_mixture(const std::array<double, 4>& lambda) {
    // Phi+, Phi-, Psi+, Psi- in the computational basis
    const double r2 = 1.0 / std::sqrt(2.0);
    std::array<Vec, 4> bell;
    for (auto& v : bell) v = Vec(4);
    bell[0][0] = r2;
    bell[0][3] = r2;
    bell[1][0] = r2;
    bell[1][3] = -r2;
    bell[2][1] = r2;
    bell[2][2] = r2;
    bell[3][1] = r2;
    bell[3][2] = -r2;
    Mat rho(4);
    for (int i = 0; i < 4; ++i) add_scaled(rho, cxd{lambda[i], 0.0}, outer(bell[i], bell[i]));
    return rho;
}

// Largest separation at which the chain still wins asymptotically, by
// bisection; the advantage region is an interval (0, L*) at eta_c = 1.
double beat_window_km(const CodeSpec& code, double eta_c) {
    double lo = 1.0, hi = 40.0;
    REQUIRE(asymptotic_beat(code, eta_c, lo));
    REQUIRE(!asymptotic_beat(code, eta_c, hi));
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (asymptotic_beat(code, eta_c, mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("repeaterless bound") {
    CHECK(repeaterless_bound(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(repeaterless_bound(1.0)));
    CHECK(repeaterless_bound(0.9) == doctest::Approx(-std::log2(0.1)).epsilon(1e-12));
    CHECK_THROWS_AS(repeaterless_bound(0.0), std::invalid_argument);
    CHECK_THROWS_AS(repeaterless_bound(1.1), std::invalid_argument);
    // 50 km of 0.2 dB/km fibre: eta = 0.1
    CHECK(repeaterless_bound_km(50.0) == doctest::Approx(0.15200309344505).epsilon(1e-10));
    CHECK_THROWS_AS(repeaterless_bound_km(0.0), std::invalid_argument);
}

TEST_CASE("segment model") {
    SegmentModel m{builtin_code("three-mode"), 0.9, 10.0, 0.2};
    CHECK(m.eta_s() == doctest::Approx(std::pow(10.0, -0.2)).epsilon(1e-14));
    CHECK(m.eta() == doctest::Approx(0.9 * std::pow(10.0, -0.2)).epsilon(1e-14));
    CHECK_NOTHROW(m.validate());
    m.alpha = 0.0;  // lossless fibre is allowed
    CHECK(m.eta_s() == 1.0);
    CHECK_NOTHROW(m.validate());
    m.alpha = -0.1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.alpha = 0.2;
    m.eta_c = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.eta_c = 0.9;
    m.sep_km = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("success probabilities in closed form") {
    const CodeSpec three = builtin_code("three-mode");
    const CodeSpec two = builtin_code("two-mode");
    CHECK(success_probability(three, 0.9) == doctest::Approx(0.972).epsilon(1e-13));
    CHECK(success_probability(two, 0.9) == doctest::Approx(0.9477).epsilon(1e-13));
    CHECK(success_probability(three, 1.0) == 1.0);

    Rng rng(61);
    for (int t = 0; t < 50; ++t) {
        const double eta = 0.02 + 0.96 * rng.uniform();
        const double e2 = eta * eta, e3 = e2 * eta, e4 = e3 * eta;
        CHECK(std::abs(success_probability(three, eta) - (3 * e2 - 2 * e3)) < 1e-12);
        CHECK(std::abs(success_probability(two, eta) - (4 * e3 - 3 * e4)) < 1e-12);
    }
    CHECK_THROWS_AS(success_probability(builtin_code("single-mode"), 0.9), std::domain_error);
}

TEST_CASE("asymptotic advantage windows at perfect coupling") {
    const CodeSpec three = builtin_code("three-mode");
    const CodeSpec two = builtin_code("two-mode");
    CHECK(asymptotic_beat(three, 1.0, 15.0));
    CHECK(!asymptotic_beat(three, 1.0, 15.1));
    CHECK(asymptotic_beat(two, 1.0, 5.7));
    CHECK(!asymptotic_beat(two, 1.0, 5.8));

    // p_s(eta) = eta has roots eta = 1/2 resp. (1+sqrt(13))/6
    const double l3 = 50.0 * std::log10(2.0);
    CHECK(beat_window_km(three, 1.0) == doctest::Approx(l3).epsilon(1e-7));
    const double l2 = -50.0 * std::log10((1.0 + std::sqrt(13.0)) / 6.0);
    CHECK(beat_window_km(two, 1.0) == doctest::Approx(l2).epsilon(1e-7));

    CHECK_THROWS_AS(asymptotic_beat(builtin_code("single-mode"), 1.0, 1.0), std::domain_error);
}

TEST_CASE("coupling thresholds bracket the advantage") {
    const CodeSpec three = builtin_code("three-mode");
    // below 8/9 no separation works; just above, the optimal one does
    for (double sep : {2.0, 3.7, 3.84, 5.0}) CHECK(!asymptotic_beat(three, 0.888, sep));
    CHECK(asymptotic_beat(three, 0.8951, 3.84));
    for (const auto& name : builtin_code_names()) {
        if (name == "single-mode") continue;
        for (double sep : {1.0, 5.0, 15.0, 30.0})
            CHECK(!asymptotic_beat(builtin_code(name), 0.5, sep));
    }
}

TEST_CASE("segments preserve trace and factor structure") {
    Rng rng(67);
    const CodeSpec code = builtin_code("three-mode");
    SegmentModel m{code, 0.9, 2.0, 0.2};
    const SegmentChannel seg = segment_channel(m);
    const Mat rho = random_density(code.basis.dim, rng);
    const Mat out = apply_segment(seg, rho);
    CHECK(std::abs(trace(out) - cxd{1.0, 0.0}) < 1e-12);
    CHECK(min_eigenvalue_hermitian(out) > -1e-11);

    const Mat front = random_density(2, rng);
    const Mat joint = kron(front, rho);
    CHECK(max_abs_diff(apply_segment_back(seg, joint, 2), kron(front, out)) < 1e-12);
}

TEST_CASE("fresh chain state is a perfect logical bell pair") {
    const CodeSpec code = builtin_code("two-mode");
    const ChainState state = initial_chain_state(code);
    CHECK(state.joint.n == 2 * code.basis.dim);
    CHECK(std::abs(trace(state.joint) - cxd{1.0, 0.0}) < 1e-13);
    const ConditionedState cond = condition_on_code(state, code);
    CHECK(cond.p_in == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cond.two_qubit(0, 0) - cxd{0.5, 0.0}) < 1e-13);
    CHECK(std::abs(cond.two_qubit(0, 3) - cxd{0.5, 0.0}) < 1e-13);
    CHECK(six_state_rate(cond.two_qubit) == doctest::Approx(1.0).epsilon(1e-12));
    const auto lambda = bell_diagonal(cond.two_qubit);
    CHECK(lambda[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("number-eigenspace chains decay by p_s per segment and stay bell") {
    const CodeSpec code = builtin_code("three-mode");
    SegmentModel m{code, 0.92, 3.0, 0.2};
    const double ps = success_probability(code, m.eta());
    const SegmentChannel seg = segment_channel(m);
    ChainState state = initial_chain_state(code);
    for (int n = 1; n <= 8; ++n) {
        advance_chain(state, seg);
        const ConditionedState cond = condition_on_code(state, code);
        CHECK(std::abs(cond.p_in - std::pow(ps, n)) < 1e-10);
        CHECK(six_state_rate(cond.two_qubit) == doctest::Approx(1.0).epsilon(1e-11));
        const double direct = chain_rate_per_mode(m, n);
        CHECK(std::abs(direct - cond.p_in * six_state_rate(cond.two_qubit) / 3.0) < 1e-10);
    }
    CHECK_THROWS_AS(chain_rate_per_mode(m, 0), std::invalid_argument);
}

TEST_CASE("perfect segments give the full bell rate per mode") {
    SegmentModel m{builtin_code("three-mode"), 1.0, 4.0, 0.0};
    CHECK(chain_rate_per_mode(m, 5) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(chain_rate_per_mode(m, 5, false) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("single-mode segment map coefficients") {
    const CodeSpec code = builtin_code("single-mode");
    const FockBasis& b = code.basis;
    Rng rng(73);
    for (int t = 0; t < 20; ++t) {
        const double eta = 0.05 + 0.9 * rng.uniform();
        const SingleModeCoeffs k = single_mode_coeffs(eta);
        CHECK(std::abs(k.survival - (3 * eta * eta - 2 * eta * eta * eta)) < 1e-15);

        SegmentModel m{code, eta, 1.0, 0.0};  // lossless fibre: eta comes from coupling
        const SegmentChannel seg = segment_channel(m);

        Mat one(b.dim), three(b.dim), coh(b.dim);
        one(1, 1) = 1.0;
        three(3, 3) = 1.0;
        coh(1, 3) = 1.0;
        const Mat m1 = apply_segment(seg, one);
        const Mat m3 = apply_segment(seg, three);
        const Mat mc = apply_segment(seg, coh);

        CHECK(max_abs_diff(m1, one) < 1e-12);
        CHECK(std::abs(m3(3, 3) - cxd{k.survival, 0.0}) < 1e-12);
        CHECK(std::abs(m3(1, 1) - cxd{1.0 - k.survival, 0.0}) < 1e-12);
        CHECK(std::abs(mc(1, 3) - cxd{k.coherence, 0.0}) < 1e-12);
        // nothing leaks anywhere else
        Mat expect3(b.dim), expectc(b.dim);
        expect3(3, 3) = k.survival;
        expect3(1, 1) = 1.0 - k.survival;
        expectc(1, 3) = k.coherence;
        CHECK(max_abs_diff(m3, expect3) < 1e-12);
        CHECK(max_abs_diff(mc, expectc) < 1e-12);
    }
}

TEST_CASE("single-mode chain closed form matches simulation") {
    const CodeSpec code = builtin_code("single-mode");
    for (double eta : {0.8, 0.93, 0.97}) {
        SegmentModel m{code, eta, 1.0, 0.0};
        const SegmentChannel seg = segment_channel(m);
        ChainState state = initial_chain_state(code);
        advance_chain(state, seg, 25);
        const ConditionedState cond = condition_on_code(state, code);
        CHECK(std::abs(cond.p_in - 1.0) < 1e-12);
        CHECK(max_abs_diff(cond.two_qubit, single_mode_two_qubit(eta, 25)) < 1e-10);

        advance_chain(state, seg, 75);
        const ConditionedState c100 = condition_on_code(state, code);
        CHECK(max_abs_diff(c100.two_qubit, single_mode_two_qubit(eta, 100)) < 1e-10);

        // the rate helper agrees with the simulated chain
        CHECK(std::abs(chain_rate_per_mode(m, 25) - single_mode_rate(eta, 25)) < 1e-10);
    }
}

TEST_CASE("single-mode rate is monotone in the segment count") {
    for (double eta : {0.9, 0.99}) {
        double prev = single_mode_rate(eta, 0);
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
        for (int n = 1; n <= 50; ++n) {
            const double r = single_mode_rate(eta, n);
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
}

TEST_CASE("bell decomposition and the six-state rate") {
    const std::array<double, 4> lambda{0.93, 0.03, 0.02, 0.02};
    const Mat rho = bell_mixture(lambda);
    const auto back = bell_diagonal(rho);
    double h = 0.0;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(back[i] - lambda[i]) < 1e-14);
        h -= lambda[i] * std::log2(lambda[i]);
    }
    CHECK(six_state_rate(rho) == doctest::Approx(1.0 - h).epsilon(1e-12));
    CHECK(six_state_rate(bell_mixture({1.0, 0.0, 0.0, 0.0})) == doctest::Approx(1.0));
    CHECK(six_state_rate(bell_mixture({0.25, 0.25, 0.25, 0.25})) == 0.0);
    CHECK_THROWS_AS(bell_diagonal(Mat::identity(3)), std::invalid_argument);
}

TEST_CASE("six-state rate hits zero near 12.6 percent bit error") {
    const auto rate_at = [](double q) {
        return six_state_rate(bell_mixture({1.0 - 1.5 * q, 0.5 * q, 0.5 * q, 0.5 * q}));
    };
    double lo = 0.05, hi = 0.2;
    REQUIRE(rate_at(lo) > 0.0);
    REQUIRE(rate_at(hi) == 0.0);
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(0.126193).epsilon(5e-4));
}

TEST_CASE("optimal separation maximizes the per-segment advantage") {
    const CodeSpec three = builtin_code("three-mode");
    const CodeSpec two = builtin_code("two-mode");
    // closed form: eta_s* = 3/(4 eta_c) resp. 8/(9 eta_c)
    CHECK(optimal_separation(three, 1.0) == doctest::Approx(-50.0 * std::log10(0.75)).epsilon(5e-3));
    CHECK(optimal_separation(two, 1.0) == doctest::Approx(-50.0 * std::log10(8.0 / 9.0)).epsilon(5e-3));
    const double l = optimal_separation(three, 0.9);
    CHECK(l == doctest::Approx(-50.0 * std::log10(3.0 / 3.6)).epsilon(5e-3));
    CHECK(l > 3.0);
    CHECK(l < 7.0);
    CHECK_THROWS_AS(optimal_separation(builtin_code("single-mode"), 0.9), std::domain_error);
    CHECK_THROWS_AS(optimal_separation(three, 0.0), std::invalid_argument);
}

TEST_CASE("grid helper") {
    const GridSpec g{0.85, 1.0, 0.001};
    const auto v = g.values();
    REQUIRE(v.size() == 151);
    CHECK(v.front() == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(v.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(GridSpec{0.5, 30.0, 0.1}.values().size() == 296);
    CHECK(GridSpec{2.0, 2.0, 0.5}.values() == std::vector<double>{2.0});
    CHECK_THROWS_AS((GridSpec{1.0, 0.0, 0.1}.values()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 0.0}.values()), std::invalid_argument);
}

TEST_CASE("region scan locates the three-mode coupling threshold") {
    const CodeSpec code = builtin_code("three-mode");
    const RegionResult res = region_scan(code, {0.85, 0.98, 0.01}, {2.0, 6.0, 0.5});
    CHECK(!res.empty);
    CHECK(res.monotone_in_eta_c);
    CHECK(res.min_threshold_eta_c == doctest::Approx(8.0 / 9.0).epsilon(1e-3));
    CHECK(res.max_coupling_loss == doctest::Approx(1.0 - 8.0 / 9.0).epsilon(1e-2));
    CHECK(res.best_sep_km == doctest::Approx(3.5));

    // boundary markers: exactly the lowest beating row of each column
    for (std::size_t il = 0; il < res.sep_km.size(); ++il) {
        std::size_t first = res.eta_c.size();
        for (std::size_t ie = 0; ie < res.eta_c.size(); ++ie)
            if (res.beats[res.index(ie, il)]) {
                first = ie;
                break;
            }
        for (std::size_t ie = 0; ie < res.eta_c.size(); ++ie)
            CHECK(int(res.boundary[res.index(ie, il)]) == ((ie == first) ? 1 : 0));
        if (first < res.eta_c.size()) {
            CHECK(res.threshold_eta_c[il] <= res.eta_c[first] + 1e-12);
            CHECK(res.threshold_eta_c[il] >= res.eta_c[first] - 0.01);
        } else {
            CHECK(std::isnan(res.threshold_eta_c[il]));
        }
    }
}

TEST_CASE("region scan is identical across worker counts") {
    const CodeSpec code = builtin_code("two-mode");
    RegionOptions serial, parallel;
    parallel.jobs = 4;
    const RegionResult a = region_scan(code, {0.9, 1.0, 0.01}, {1.0, 5.0, 1.0}, serial);
    const RegionResult b = region_scan(code, {0.9, 1.0, 0.01}, {1.0, 5.0, 1.0}, parallel);
    CHECK(a.beats == b.beats);
    CHECK(a.boundary == b.boundary);
    REQUIRE(a.threshold_eta_c.size() == b.threshold_eta_c.size());
    for (std::size_t i = 0; i < a.threshold_eta_c.size(); ++i) {
        if (std::isnan(a.threshold_eta_c[i]))
            CHECK(std::isnan(b.threshold_eta_c[i]));
        else
            CHECK(a.threshold_eta_c[i] == b.threshold_eta_c[i]);
    }
    CHECK(a.min_threshold_eta_c == b.min_threshold_eta_c);
}

TEST_CASE("single-mode advantage region sits at tiny separations") {
    const CodeSpec code = builtin_code("single-mode");
    RegionOptions opts;
    opts.n_ceiling = 2000;
    const RegionResult coarse = region_scan(code, {0.9, 1.0, 0.05}, {0.5, 2.0, 0.5}, opts);
    CHECK(coarse.empty);

    RegionOptions fine;
    fine.n_ceiling = 10000;
    const RegionResult sub = region_scan(code, {0.999, 1.0, 0.0005}, {0.01, 0.03, 0.01}, fine);
    CHECK(!sub.empty);
    CHECK(sub.max_coupling_loss < 0.001);  // only nearly-perfect coupling qualifies
    // the beating cells really do beat: recheck one against the raw curves
    bool any = false;
    for (std::size_t ie = 0; ie < sub.eta_c.size() && !any; ++ie)
        for (std::size_t il = 0; il < sub.sep_km.size() && !any; ++il)
            if (sub.beats[sub.index(ie, il)]) {
                const double sep = sub.sep_km[il];
                const SeparationPolicy pol{false, sep};
                const RateCurve curve =
                    rate_vs_distance(code, sub.eta_c[ie], 0.2, 10000.0 * sep, pol);
                CHECK(first_beat_distance(curve).has_value());
                any = true;
            }
    CHECK(any);
}

TEST_CASE("rate curves against the repeaterless bound") {
    const CodeSpec code = builtin_code("three-mode");
    const SeparationPolicy opt{true, 0.0};
    const RateCurve curve = rate_vs_distance(code, 0.95, 0.2, 200.0, opt);
    CHECK(curve.sep_km == doctest::Approx(-50.0 * std::log10(3.0 / 3.8)).epsilon(5e-3));
    REQUIRE(!curve.points.empty());
    CHECK(curve.points.size() == std::size_t(std::floor(200.0 / curve.sep_km)));
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const RatePoint& p = curve.points[i];
        CHECK(p.n == int(i) + 1);
        CHECK(p.x_km == doctest::Approx(p.n * curve.sep_km).epsilon(1e-12));
        if (i > 0) {
            CHECK(p.rate < curve.points[i - 1].rate);
            CHECK(p.bound < curve.points[i - 1].bound);
        }
    }
    const auto cross = first_beat_distance(curve);
    REQUIRE(cross.has_value());
    CHECK(*cross > 50.0);
    CHECK(*cross < 200.0);

    const SeparationPolicy fixed{false, 2.0};
    const RateCurve fc = rate_vs_distance(code, 0.95, 0.2, 200.0, fixed);
    CHECK(fc.sep_km == 2.0);
    CHECK(fc.points.size() == 100);

    const RateCurve total = rate_vs_distance(code, 0.95, 0.2, 200.0, fixed, false);
    CHECK(total.points[10].rate == doctest::Approx(3.0 * fc.points[10].rate).epsilon(1e-12));

    // a chain that never wins has no crossover
    const RateCurve losing = rate_vs_distance(code, 0.5, 0.2, 100.0, fixed);
    CHECK(!first_beat_distance(losing).has_value());
}

}  // TEST_SUITE
