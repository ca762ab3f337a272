#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "dctplus/matrix.hpp"
#include "dctplus/signal.hpp"
#include "dctplus/spectral.hpp"
#include "dctplus/trig.hpp"

using namespace dctplus;

namespace {

std::vector<double> dst1_direct(const std::vector<double>& h) {
    const std::size_t m = h.size();
    const double n = static_cast<double>(m + 1);
    std::vector<double> c(m, 0.0);
    for (std::size_t l = 1; l <= m; ++l) {
        double s = 0.0;
        for (std::size_t j = 1; j <= m; ++j)
            s += h[j - 1] * std::sin(static_cast<double>(l) * static_cast<double>(j) *
                                     std::numbers::pi / n);
        c[l - 1] = 2.0 * s;
    }
    return c;
}

} // namespace

TEST_CASE("dct2 conventions") {
    SECTION("constant maps to the DC bin") {
        const double cval = 2.5;
        const std::vector<double> s(9, cval);
        const auto p = dct2(s);
        CHECK(p[0] == Approx(cval * std::sqrt(9.0)).epsilon(1e-13));
        for (std::size_t k = 1; k < 9; ++k) CHECK(std::abs(p[k]) < 1e-13);
    }
    SECTION("round trip") {
        Rng rng(3);
        std::vector<double> s(16);
        for (auto& v : s) v = rng.gaussian();
        const auto back = idct2(dct2(s));
        CHECK(max_abs_diff(s, back) < 1e-12 * norm2(s));
    }
    SECTION("matches the dense DCT-II basis, n = 8") {
        const SpectralBasis b = path_spectrum(8);
        Rng rng(5);
        std::vector<double> s(8);
        for (auto& v : s) v = rng.gaussian();
        const auto fast = dct2(s);
        const auto dense = matvec_t(b.u, s);
        CHECK(max_abs_diff(fast, dense) < 1e-12 * norm2(s));
    }
    SECTION("idct2(e1) is the constant vector") {
        std::vector<double> e1(6, 0.0);
        e1[0] = 1.0;
        const auto s = idct2(e1);
        for (double v : s) CHECK(v == Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
    }
    SECTION("norm preservation") {
        Rng rng(9);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> s(32);
            for (auto& v : s) v = rng.gaussian();
            CHECK(norm2(dct2(s)) == Approx(norm2(s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dst1 conventions") {
    SECTION("n = 4, h = e1") {
        const auto c = dst1({1.0, 0.0, 0.0});
        CHECK(c[0] == Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(c[1] == Approx(2.0).epsilon(1e-14));
        CHECK(c[2] == Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
    SECTION("self-inverse up to 2n") {
        Rng rng(21);
        std::vector<double> h(7);
        for (auto& v : h) v = rng.gaussian();
        const auto twice = dst1(dst1(h));
        for (std::size_t i = 0; i < h.size(); ++i)
            CHECK(twice[i] == Approx(2.0 * 8.0 * h[i]).epsilon(1e-12).margin(1e-12));
    }
    SECTION("matches direct summation, n = 16") {
        Rng rng(23);
        std::vector<double> h(15);
        for (auto& v : h) v = rng.gaussian();
        CHECK(max_abs_diff(dst1(h), dst1_direct(h)) < 1e-12 * norm2(h));
    }
}

TEST_CASE("chebyshev utilities") {
    CHECK(chebyshev_u(0, 0.3) == 1.0);
    CHECK(chebyshev_u(1, 0.3) == Approx(0.6));
    CHECK(chebyshev_u(4, 0.7) == Approx(std::sin(5.0 * std::acos(0.7)) / std::sin(std::acos(0.7)))
                                      .epsilon(1e-12));

    const auto y = u_roots(4);
    REQUIRE(y.size() == 3);
    CHECK(y[0] == Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(y[1] == Approx(0.0).margin(1e-15));
    CHECK(y[2] == Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-15));

    SECTION("roots match the path spectrum through y_k = 1 - lambda_{k+1}/2") {
        const SpectralBasis b = path_spectrum(8);
        const auto roots = u_roots(8);
        for (std::size_t k = 0; k < roots.size(); ++k)
            CHECK(roots[k] == Approx(1.0 - b.lambda[k + 1] / 2.0).margin(1e-12));
    }
}

TEST_CASE("discrete Chebyshev orthogonality over U_{n-1} roots") {
    // sum_k (1 - y_k^2) U_l(y_k) U_m(y_k) = (n/2) delta[l-m] for l+m <= 2n-3.
    for (std::size_t n : {4, 8, 16, 32}) {
        const auto y = u_roots(n);
        for (unsigned l = 0; l + 1 < n; ++l) {
            for (unsigned m = l; l + m <= 2 * n - 3 && m + 1 < n; ++m) {
                double s = 0.0;
                for (double yk : y) s += (1.0 - yk * yk) * chebyshev_u(l, yk) * chebyshev_u(m, yk);
                const double expect = (l == m) ? static_cast<double>(n) / 2.0 : 0.0;
                REQUIRE(s == Approx(expect).margin(1e-9 * static_cast<double>(n)));
            }
        }
    }
}

TEST_CASE("1 - y_j^2 equals sin^2(j pi / n)") {
    for (std::size_t n : {5, 12, 33}) {
        const auto y = u_roots(n);
        for (std::size_t j = 1; j < n; ++j) {
            const double s = std::sin(static_cast<double>(j) * std::numbers::pi /
                                      static_cast<double>(n));
            CHECK(1.0 - y[j - 1] * y[j - 1] == Approx(s * s).margin(1e-14));
        }
    }
}

TEST_CASE("trig plan size checks") {
    TrigPlan plan(TrigKind::dct2, 8);
    CHECK_THROWS_AS(plan.execute(std::vector<double>(5, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(dct2({1.0}), std::invalid_argument);
}
