#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include "dctplus/fast_transform.hpp"
#include "dctplus/signal.hpp"
#include "dctplus/trig.hpp"

using namespace dctplus;

namespace {

const std::vector<RankOneUpdate> kBenchUpdates = {
    RankOneUpdate::self_loop(1, 1.5),    // self-loop addition
    RankOneUpdate::edge_delta(2, 3, 1.5), // edge update
    RankOneUpdate::edge_delta(3, 5, 1.5), // edge addition
};

double aligned_max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::min(std::abs(a[i] - b[i]), std::abs(a[i] + b[i])));
    return worst;
}

} // namespace

TEST_CASE("plan_dctplus on the three update types") {
    for (const auto& u : kBenchUpdates) {
        const DctPlusPlan plan(8, u, 1e-12);
        CHECK_FALSE(plan.slow_path());
        const auto& spec = plan.factorization().spec;
        // Strict interleaving on the non-deflated subproblem, weak on the
        // merged list (pass-through slots keep mu = lambda exactly).
        for (std::size_t i = 0; i < spec.sub_mu.size(); ++i) {
            CHECK(spec.sub_mu[i] > spec.sub_lambda[i]);
            if (i + 1 < spec.sub_mu.size()) CHECK(spec.sub_mu[i] < spec.sub_lambda[i + 1]);
        }
        const auto& lambda = plan.lambda();
        const auto& mu = plan.mu();
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(mu[i] >= lambda[i]);
            if (i + 1 < 8) CHECK(mu[i] <= lambda[i + 1]);
        }
    }
    CHECK_THROWS_AS(DctPlusPlan(1, kBenchUpdates[0], 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(DctPlusPlan(8, kBenchUpdates[0], 2.0), std::invalid_argument);
}

TEST_CASE("forward matches the dense oracle") {
    SECTION("update direction as the signal (pole stress)") {
        for (const auto& u : kBenchUpdates) {
            const std::size_t n = 16;
            const DctPlusPlan plan(n, u, 1e-12);
            auto v = u.direction(n);
            const double nv = norm2(v);
            for (auto& x : v) x /= nv;
            const auto fast = plan.forward(v);
            const auto oracle = plan.forward_nmvp(v);
            CHECK(snr_db(oracle, fast) >= 100.0);
        }
    }
    SECTION("SNR >= 100 dB across sizes and update types") {
        Rng rng(101);
        for (std::size_t n : {8, 32, 128}) {
            for (const auto& u : kBenchUpdates) {
                const DctPlusPlan plan(n, u, 1e-12);
                DctPlusWorkspace ws = plan.make_workspace();
                for (int rep = 0; rep < 10; ++rep) {
                    const auto s = gen_ar_signal(n, 0.99, rng);
                    const std::vector<double> fast = plan.forward(s, ws);
                    const std::vector<double>& oracle = plan.forward_nmvp(s, ws);
                    REQUIRE(snr_db(oracle, fast) >= 100.0);
                }
            }
        }
    }
    SECTION("near-zero rho degenerates continuously to the DCT") {
        const std::size_t n = 16;
        const DctPlusPlan plan(n, RankOneUpdate::self_loop(1, 1e-12), 1e-12);
        CHECK(plan.slow_path()); // near-pole guard must trip
        Rng rng(103);
        const auto s = gen_ar_signal(n, 0.99, rng);
        const auto got = plan.forward(s);
        const auto ref = dct2(s);
        // Column signs of a near-degenerate perturbation are convention-bound;
        // compare magnitudes per coefficient.
        CHECK(aligned_max_diff(got, ref) < 1e-4 * norm2(s));
    }
    SECTION("non-finite input rejected") {
        const DctPlusPlan plan(8, kBenchUpdates[0], 1e-12);
        std::vector<double> s(8, 1.0);
        s[3] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(plan.forward(s), std::domain_error);
        CHECK_THROWS_AS(plan.forward(std::vector<double>(5, 1.0)), std::invalid_argument);
    }
}

TEST_CASE("forward_nmvp properties") {
    const std::size_t n = 8;
    const DctPlusPlan plan(n, kBenchUpdates[1], 1e-12);
    SECTION("equals the synthesized-basis transform up to column sign vs dense_eigh") {
        const auto l = apply_rank_one(path_laplacian(n), kBenchUpdates[1]);
        const auto oracle = dense_eigh(l.m);
        Rng rng(107);
        std::vector<double> s(n);
        for (auto& v : s) v = rng.gaussian();
        const auto got = plan.forward_nmvp(s);
        const auto expect = matvec_t(oracle.u, s);
        CHECK(aligned_max_diff(got, expect) < 1e-9 * norm2(s));
    }
    SECTION("linear in the signal") {
        Rng rng(109);
        std::vector<double> a(n), b(n), combo(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.gaussian();
            b[i] = rng.gaussian();
            combo[i] = 2.0 * a[i] - 0.5 * b[i];
        }
        const auto pa = plan.forward_nmvp(a);
        const auto pb = plan.forward_nmvp(b);
        const auto pc = plan.forward_nmvp(combo);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(pc[i] == Approx(2.0 * pa[i] - 0.5 * pb[i]).margin(1e-12));
    }
}

TEST_CASE("inverse") {
    SECTION("round trip at n = 32 for all update types") {
        Rng rng(113);
        for (const auto& u : kBenchUpdates) {
            const DctPlusPlan plan(32, u, 1e-12);
            DctPlusWorkspace ws = plan.make_workspace();
            for (int rep = 0; rep < 5; ++rep) {
                const auto s = gen_ar_signal(32, 0.99, rng);
                const std::vector<double> coeff = plan.forward(s, ws);
                const std::vector<double> back = plan.inverse(coeff, ws);
                REQUIRE(snr_db(s, back) >= 100.0);
            }
        }
    }
    SECTION("basis vector round trip") {
        const DctPlusPlan plan(16, kBenchUpdates[0], 1e-12);
        std::vector<double> e1(16, 0.0);
        e1[0] = 1.0;
        const auto back = plan.inverse(plan.forward(e1));
        for (std::size_t i = 0; i < 16; ++i)
            CHECK(back[i] == Approx(e1[i]).margin(1e-8));
    }
    SECTION("fast inverse equals the dense X p product") {
        const DctPlusPlan plan(24, kBenchUpdates[2], 1e-12);
        Rng rng(127);
        std::vector<double> p(24);
        for (auto& v : p) v = rng.gaussian();
        const auto fast = plan.inverse(p, true);
        const auto dense = plan.inverse(p, false);
        CHECK(max_abs_diff(fast, dense) < 1e-10 * norm2(p));
    }
}

TEST_CASE("Parseval") {
    Rng rng(131);
    for (std::size_t n : {8, 64, 256}) {
        const DctPlusPlan plan(n, kBenchUpdates[0], 1e-12);
        DctPlusWorkspace ws = plan.make_workspace();
        for (int rep = 0; rep < 5; ++rep) {
            const auto s = gen_ar_signal(n, 0.99, rng);
            const std::vector<double>& c = plan.forward(s, ws);
            REQUIRE(norm2(c) / norm2(s) == Approx(1.0).margin(1e-5));
        }
    }
}

TEST_CASE("halving epsilon never hurts accuracy on average") {
    // n large enough that the NFST runs its FFT route (the dense small-size
    // kernel is exact regardless of epsilon).
    Rng rng(137);
    const std::size_t n = 256;
    const DctPlusPlan coarse(n, kBenchUpdates[1], 1e-4);
    const DctPlusPlan fine(n, kBenchUpdates[1], 1e-12);
    DctPlusWorkspace wc = coarse.make_workspace(), wf = fine.make_workspace();
    double err_coarse = 0.0, err_fine = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = gen_ar_signal(n, 0.99, rng);
        const std::vector<double> oracle = fine.forward_nmvp(s, wf);
        std::vector<double> diff = coarse.forward(s, wc);
        for (std::size_t i = 0; i < n; ++i) diff[i] -= oracle[i];
        err_coarse += norm2(diff);
        diff = fine.forward(s, wf);
        for (std::size_t i = 0; i < n; ++i) diff[i] -= oracle[i];
        err_fine += norm2(diff);
    }
    CHECK(err_fine <= err_coarse);
}

TEST_CASE("deflating update keeps the fast path exact") {
    // edge(2,3) on even n has an exactly vanishing z component; the plan must
    // pass it through and still match the oracle.
    const std::size_t n = 12;
    const DctPlusPlan plan(n, RankOneUpdate::edge_delta(2, 3, 1.5), 1e-12);
    CHECK_FALSE(plan.factorization().spec.deflation.passed.empty());
    Rng rng(139);
    DctPlusWorkspace ws = plan.make_workspace();
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = gen_ar_signal(n, 0.99, rng);
        const std::vector<double> fast = plan.forward(s, ws);
        const std::vector<double>& oracle = plan.forward_nmvp(s, ws);
        REQUIRE(snr_db(oracle, fast) >= 100.0);
    }
}

TEST_CASE("smallest sizes, including an empty interior stage") {
    // n = 2 with an edge update deflates the DC coordinate entirely: the
    // plan has one pass-through and one exterior root, no NFST stage.
    Rng rng(151);
    for (std::size_t n : {2, 3, 4}) {
        for (const auto& u : {RankOneUpdate::self_loop(1, 1.5),
                              RankOneUpdate::edge_delta(1, 2, 0.75)}) {
            const DctPlusPlan plan(n, u, 1e-12);
            DctPlusWorkspace ws = plan.make_workspace();
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> s(n);
                for (auto& v : s) v = rng.gaussian();
                const std::vector<double> fast = plan.forward(s, ws);
                const std::vector<double>& oracle = plan.forward_nmvp(s, ws);
                REQUIRE(max_abs_diff(fast, oracle) < 1e-10 * (norm2(s) + 1.0));
                const std::vector<double> back = plan.inverse(fast, ws);
                REQUIRE(max_abs_diff(back, s) < 1e-10 * (norm2(s) + 1.0));
            }
        }
    }
}

TEST_CASE("negative rho (edge removal) works through the mirrored pipeline") {
    Rng rng(149);
    for (std::size_t n : {8, 33, 64}) {
        const auto u = RankOneUpdate::edge_delta(2, 3, -0.8);
        const DctPlusPlan plan(n, u, 1e-12);
        DctPlusWorkspace ws = plan.make_workspace();
        for (int rep = 0; rep < 8; ++rep) {
            const auto s = gen_ar_signal(n, 0.99, rng);
            const std::vector<double> fast = plan.forward(s, ws);
            const std::vector<double>& oracle = plan.forward_nmvp(s, ws);
            REQUIRE(snr_db(oracle, fast) >= 100.0);
            const std::vector<double> back = plan.inverse(fast, ws);
            REQUIRE(snr_db(s, back) >= 100.0);
        }
    }
}

TEST_CASE("degenerate plan sizes rejected before any planning") {
    CHECK_THROWS_AS(DctPlusPlan(0, RankOneUpdate::self_loop(1, 1.0), 1e-12),
                    std::invalid_argument);
    CHECK_THROWS_AS(DctPlusPlan(1, RankOneUpdate::self_loop(1, 1.0), 1e-12),
                    std::invalid_argument);
}

TEST_CASE("disconnecting edge removal routes through the guarded dense path") {
    // Removing an interior edge splits the path: the perturbed Laplacian
    // gains a second zero eigenvalue, which collides with the base spectrum
    // and must trip the near-pole guard rather than reach the NFST stage.
    const std::size_t n = 16;
    const DctPlusPlan plan(n, RankOneUpdate::edge_delta(8, 9, -1.0), 1e-12);
    CHECK(plan.slow_path());
    Rng rng(157);
    DctPlusWorkspace ws = plan.make_workspace();
    const auto s = gen_ar_signal(n, 0.99, rng);
    const std::vector<double> coeffs = plan.forward(s, ws);
    const std::vector<double> back = plan.inverse(coeffs, ws);
    CHECK(snr_db(s, back) >= 200.0);

    const auto oracle = dense_eigh(apply_rank_one(path_laplacian(n),
                                                  RankOneUpdate::edge_delta(8, 9, -1.0))
                                       .m);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(plan.mu()[k] == Approx(oracle.lambda[k]).margin(1e-9));
}
