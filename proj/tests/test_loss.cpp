#include "qrep/loss.hpp"

#include "doctest.h"

#include <cmath>

using namespace qrep;

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

Mat basis_density(const FockBasis& b, const std::vector<int>& occ) {
    const StateVector s = basis_state(b, occ);
    return outer(s.v, s.v);
}

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("kraus coefficients against hand values") {
    const FockBasis b(1, 3);
    const KrausChannel ch = build_loss_channel(b, 0.75);
    REQUIRE(ch.ops.size() == 4);
    REQUIRE(ch.ops.front().label == std::vector<int>{0});
    // <0| A_1 |1> = sqrt(C(1,1)) (1-eta)^(1/2) eta^0 = 0.5 at eta = 0.75
    CHECK(std::abs(ch.ops[1].m(0, 1) - cxd{0.5, 0.0}) < 1e-15);
    // <1| A_2 |3> = sqrt(C(3,2)) (1-eta) eta^(1/2)
    const double want = std::sqrt(3.0) * 0.25 * std::sqrt(0.75);
    CHECK(std::abs(ch.ops[2].m(1, 3) - cxd{want, 0.0}) < 1e-15);
    // no-loss element is diagonal with eta^(n/2)
    for (int n = 0; n <= 3; ++n)
        CHECK(std::abs(ch.ops[0].m(n, n) - std::pow(0.75, 0.5 * n)) < 1e-15);
    CHECK(ch.completeness_residual() < 1e-14);
}

TEST_CASE("single photon splits between survival and loss") {
    const FockBasis b(1, 3);
    const KrausChannel ch = build_loss_channel(b, 0.6);
    const Mat out = apply_channel(ch, basis_density(b, {1}));
    CHECK(std::abs(out(1, 1) - cxd{0.6, 0.0}) < 1e-14);
    CHECK(std::abs(out(0, 0) - cxd{0.4, 0.0}) < 1e-14);
    CHECK(std::abs(trace(out) - cxd{1.0, 0.0}) < 1e-14);
}

TEST_CASE("fock state photon statistics are binomial") {
    const FockBasis b(1, 5);
    const double eta = 0.35;
    const KrausChannel ch = build_loss_channel(b, eta);
    const Mat out = apply_channel(ch, basis_density(b, {4}));
    for (int m = 0; m <= 4; ++m) {
        const double want = binom(4, m) * std::pow(eta, m) * std::pow(1 - eta, 4 - m);
        CHECK(std::abs(out(m, m) - cxd{want, 0.0}) < 1e-14);
    }
}

TEST_CASE("completeness and trace preservation on several geometries") {
    Rng rng(71);
    for (const auto& [modes, cutoff] : std::vector<std::pair<int, int>>{{1, 4}, {2, 3}, {3, 2}}) {
        const FockBasis b(modes, cutoff);
        for (double eta : {0.15, 0.6, 1.0}) {
            const KrausChannel ch = build_loss_channel(b, eta);
            CHECK(ch.completeness_residual() < 1e-13);
            const Mat rho = random_density(b.dim, rng);
            CHECK(std::abs(trace(apply_channel(ch, rho)) - cxd{1.0, 0.0}) < 1e-12);
        }
    }
    CHECK_THROWS_AS(build_loss_channel(FockBasis(1, 2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_loss_channel(FockBasis(1, 2), 1.2), std::invalid_argument);
}

TEST_CASE("eta = 1 is the identity channel") {
    Rng rng(5);
    const FockBasis b(2, 2);
    const KrausChannel ch = build_loss_channel(b, 1.0);
    const Mat rho = random_density(b.dim, rng);
    CHECK(max_abs_diff(apply_channel(ch, rho), rho) < 1e-14);
}

TEST_CASE("mean photon number scales by eta") {
    Rng rng(13);
    const FockBasis b(2, 3);
    const Operator n = number_operator(b);
    const double eta = 0.44;
    const KrausChannel ch = build_loss_channel(b, eta);
    const Mat rho = random_density(b.dim, rng);
    const double before = trace(mul(n.m, rho)).real();
    const double after = trace(mul(n.m, apply_channel(ch, rho))).real();
    CHECK(std::abs(after - eta * before) < 1e-12);
}

TEST_CASE("losses compose as a semigroup") {
    Rng rng(29);
    const FockBasis b(2, 3);
    const Mat rho = random_density(b.dim, rng);
    const Mat two_step =
        apply_channel(build_loss_channel(b, 0.7), apply_channel(build_loss_channel(b, 0.85), rho));
    const Mat one_step = apply_channel(build_loss_channel(b, 0.7 * 0.85), rho);
    CHECK(max_abs_diff(two_step, one_step) < 1e-13);
}

TEST_CASE("monomial scatter path equals dense application") {
    Rng rng(31);
    const FockBasis b(2, 3);
    const KrausChannel ch = build_loss_channel(b, 0.55);
    for (const auto& op : ch.ops) CHECK(op.monomial);
    const Mat rho = random_density(b.dim, rng);
    CHECK(max_abs_diff(apply_channel(ch, rho), apply_channel(ch, rho, true)) < 1e-14);
}

TEST_CASE("channel on the trailing factor leaves the front factor alone") {
    Rng rng(37);
    const FockBasis b(1, 3);
    const KrausChannel ch = build_loss_channel(b, 0.42);
    const Mat front = random_density(3, rng);
    const Mat rho = random_density(b.dim, rng);
    const Mat joint = kron(front, rho);
    CHECK(max_abs_diff(apply_channel_back(ch, joint, 3), kron(front, apply_channel(ch, rho))) <
          1e-13);
}

TEST_CASE("beamsplitter dilation matches the kraus channel") {
    Rng rng(43);
    for (const auto& [modes, cutoff] : std::vector<std::pair<int, int>>{{1, 3}, {2, 2}}) {
        const FockBasis b(modes, cutoff);
        for (double eta : {0.25, 0.5, 0.9}) {
            const KrausChannel ch = build_loss_channel(b, eta);
            for (int t = 0; t < 5; ++t) {
                const Mat rho = random_density(b.dim, rng);
                CHECK(max_abs_diff(stinespring_loss(b, rho, eta), apply_channel(ch, rho)) <
                      1e-12);
            }
        }
    }
    const FockBasis b(1, 3);
    const Mat rho = random_density(b.dim, rng);
    CHECK_THROWS_AS(stinespring_loss(b, rho, 0.5, 2), std::invalid_argument);
    // a roomier environment must not change anything
    CHECK(max_abs_diff(stinespring_loss(b, rho, 0.5, 5), stinespring_loss(b, rho, 0.5)) < 1e-12);
}

TEST_CASE("master equation at gamma t = ln 2 is the eta = 1/2 channel") {
    Rng rng(47);
    const FockBasis b(1, 3);
    const Mat rho = random_density(b.dim, rng);
    LindbladParams p;
    p.gamma = 1.0;
    p.time = std::log(2.0);
    const Mat evolved = lindblad_evolve(b, rho, p);
    const Mat direct = apply_channel(build_loss_channel(b, 0.5), rho);
    CHECK(max_abs_diff(evolved, direct) < 1e-6);

    // two-mode decay for a shorter time against eta = exp(-gamma t)
    const FockBasis b2(2, 2);
    const Mat rho2 = random_density(b2.dim, rng);
    LindbladParams p2;
    p2.gamma = 2.0;
    p2.time = 0.3;
    const Mat ev2 = lindblad_evolve(b2, rho2, p2);
    const Mat dir2 = apply_channel(build_loss_channel(b2, std::exp(-2.0 * 0.3)), rho2);
    CHECK(max_abs_diff(ev2, dir2) < 1e-6);
}

TEST_CASE("step-halving self check") {
    Rng rng(53);
    const FockBasis b(1, 3);
    const Mat rho = random_density(b.dim, rng);
    LindbladParams fine;
    fine.time = 0.5;
    fine.self_check = true;
    CHECK_NOTHROW(lindblad_evolve(b, rho, fine));

    LindbladParams coarse = fine;
    coarse.gamma_step = 0.25;      // far too big for RK4 at this tolerance
    coarse.self_check_tol = 1e-12;
    CHECK_THROWS_AS(lindblad_evolve(b, rho, coarse), std::runtime_error);
}

TEST_CASE("three-representation agreement report") {
    const FockBasis b(1, 3);
    const ChannelAgreement rep = representation_equivalence_report(b, 0.9, 5, 2024);
    CHECK(rep.kraus_vs_stinespring < 1e-10);
    CHECK(rep.kraus_vs_lindblad < 1e-6);
    CHECK(rep.completeness < 1e-13);
    CHECK(rep.eta == 0.9);
    CHECK(rep.states == 5);
    CHECK(rep.seed == 2024);
    const ChannelAgreement again = representation_equivalence_report(b, 0.9, 5, 2024);
    CHECK(rep.kraus_vs_stinespring == again.kraus_vs_stinespring);
    CHECK(rep.kraus_vs_lindblad == again.kraus_vs_lindblad);
}

}  // TEST_SUITE
