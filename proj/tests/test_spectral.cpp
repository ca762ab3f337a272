#include <catch2/catch.hpp>

#include <cmath>

#include "dctplus/graph.hpp"
#include "dctplus/matrix.hpp"
#include "dctplus/signal.hpp"
#include "dctplus/spectral.hpp"

using namespace dctplus;

namespace {

double eig_residual(const Matrix& l, const SpectralBasis& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < b.lambda.size(); ++k) {
        std::vector<double> col(l.rows());
        for (std::size_t i = 0; i < l.rows(); ++i) col[i] = b.u(i, k);
        const auto lu = matvec(l, col);
        for (std::size_t i = 0; i < l.rows(); ++i)
            worst = std::max(worst, std::abs(lu[i] - b.lambda[k] * col[i]));
    }
    return worst;
}

double gram_error(const Matrix& u) {
    double worst = 0.0;
    for (std::size_t a = 0; a < u.cols(); ++a)
        for (std::size_t b = 0; b < u.cols(); ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < u.rows(); ++i) s += u(i, a) * u(i, b);
            worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

RankOneUpdate random_update(std::size_t n, Rng& rng, bool allow_negative = true) {
    double w = rng.gaussian();
    if (std::abs(w) < 0.05) w = 0.5;
    if (!allow_negative) w = std::abs(w);
    if (rng.uniform() < 0.5) {
        const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) + 1;
        return RankOneUpdate::self_loop(std::min(i, n), w);
    }
    auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - 1)) + 1;
    i = std::min(i, n - 1);
    auto j = i + 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    j = std::min(j, n);
    return RankOneUpdate::edge_delta(i, j, w);
}

} // namespace

TEST_CASE("path_spectrum") {
    SECTION("n = 4 eigenvalues") {
        const auto b = path_spectrum(4);
        CHECK(b.lambda[0] == 0.0);
        CHECK(b.lambda[1] == Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
        CHECK(b.lambda[2] == Approx(2.0).epsilon(1e-14));
        CHECK(b.lambda[3] == Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
    }
    SECTION("first column is the constant eigenvector") {
        const auto b = path_spectrum(7);
        for (std::size_t j = 0; j < 7; ++j)
            CHECK(b.u(j, 0) == Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));
    }
    SECTION("diagonalizes the path Laplacian, n = 8") {
        const auto b = path_spectrum(8);
        CHECK(eig_residual(path_laplacian(8).m, b) < 1e-12);
    }
    SECTION("columns orthonormal") {
        const auto b = path_spectrum(16);
        CHECK(gram_error(b.u) < 1e-12 * 16);
    }
    CHECK_THROWS_AS(path_spectrum(1), std::invalid_argument);
}

TEST_CASE("dense_eigh") {
    SECTION("diagonal input") {
        Matrix d(3, 3);
        d(0, 0) = 3.0;
        d(1, 1) = 1.0;
        d(2, 2) = 2.0;
        const auto b = dense_eigh(d);
        CHECK(b.lambda == std::vector<double>{1.0, 2.0, 3.0});
        // columns are signed unit vectors
        for (std::size_t k = 0; k < 3; ++k) {
            double nrm = 0.0;
            for (std::size_t i = 0; i < 3; ++i) nrm += b.u(i, k) * b.u(i, k);
            CHECK(nrm == Approx(1.0).epsilon(1e-14));
        }
        CHECK(b.u(1, 0) == 1.0);
        CHECK(b.u(2, 1) == 1.0);
        CHECK(b.u(0, 2) == 1.0);
    }
    SECTION("matches path_spectrum eigenvalues") {
        const auto ref = path_spectrum(4);
        const auto b = dense_eigh(path_laplacian(4).m);
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(b.lambda[k] == Approx(ref.lambda[k]).margin(1e-10));
    }
    SECTION("2x2 characteristic polynomial") {
        Matrix a(2, 2);
        a(0, 0) = 2.0;
        a(0, 1) = a(1, 0) = -1.0;
        a(1, 1) = 1.0;
        const auto b = dense_eigh(a);
        CHECK(b.lambda[0] == Approx((3.0 - std::sqrt(5.0)) / 2.0).margin(1e-12));
        CHECK(b.lambda[1] == Approx((3.0 + std::sqrt(5.0)) / 2.0).margin(1e-12));
    }
    SECTION("residual contract on a random Laplacian") {
        Rng rng(31);
        GraphSpec g = GraphSpec::path(10);
        g.self_loops.push_back({3, 2.0});
        g.edges.push_back({2, 9, 0.5});
        const auto l = build_laplacian(g);
        const auto b = dense_eigh(l.m);
        CHECK(eig_residual(l.m, b) < 1e-10 * frobenius_norm(l.m));
        CHECK(gram_error(b.u) < 1e-12 * 10);
    }
    SECTION("non-symmetric input rejected") {
        Matrix a(2, 2);
        a(0, 1) = 1.0;
        CHECK_THROWS_AS(dense_eigh(a), std::invalid_argument);
    }
}

TEST_CASE("secular_eigenvalues") {
    SECTION("n = 2 self-loop case") {
        const std::vector<double> lambda{0.0, 2.0};
        const double r = 1.0 / std::sqrt(2.0);
        const auto mu = secular_eigenvalues(lambda, {r, r}, 1.0);
        CHECK(mu[0] == Approx((3.0 - std::sqrt(5.0)) / 2.0).margin(1e-13));
        CHECK(mu[1] == Approx((3.0 + std::sqrt(5.0)) / 2.0).margin(1e-13));
    }
    SECTION("interleaving on a path update") {
        const auto base = path_spectrum(8);
        const auto v = RankOneUpdate::self_loop(1, 1.5).direction(8);
        const auto z = matvec_t(base.u, v);
        const auto mu = secular_eigenvalues(base.lambda, z, 1.5);
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(mu[i] > base.lambda[i]);
            if (i + 1 < 8) CHECK(mu[i] < base.lambda[i + 1]);
        }
    }
    SECTION("trace identity") {
        Rng rng(37);
        const auto base = path_spectrum(12);
        for (int rep = 0; rep < 10; ++rep) {
            const auto u = random_update(12, rng);
            const auto v = u.direction(12);
            const auto z = matvec_t(base.u, v);
            const auto p = perturb_spectrum(base.lambda, z, u.rho);
            double sl = 0.0, sm = 0.0, zz = 0.0;
            for (double x : base.lambda) sl += x;
            for (double x : p.mu) sm += x;
            for (double x : v) zz += x * x;
            CHECK(sm == Approx(sl + u.rho * zz).margin(1e-12 * (std::abs(sl) + 8.0)));
        }
    }
    SECTION("error paths") {
        CHECK_THROWS_AS(secular_eigenvalues({0.0, 1.0}, {0.0, 1.0}, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(secular_eigenvalues({1.0, 1.0}, {0.5, 0.5}, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(secular_eigenvalues({0.0, 1.0}, {0.5, 0.5}, 0.0), std::invalid_argument);
    }
}

TEST_CASE("deflate") {
    SECTION("z aligned with one eigenvector") {
        const std::vector<double> lambda{0.0, 1.0, 2.0, 3.0};
        const std::vector<double> z{1.0, 0.0, 0.0, 0.0};
        const auto d = deflate(lambda, z, 1e-12);
        REQUIRE(d.kept.size() == 1);
        CHECK(d.kept[0] == 0);
        CHECK(d.passed.size() == 3);
        const auto mu = secular_eigenvalues({0.0}, {1.0}, 0.8);
        CHECK(mu[0] == Approx(0.8).margin(1e-14));
    }
    SECTION("nothing deflates for healthy z") {
        const auto d = deflate({0.0, 1.0, 2.0}, {0.5, 0.5, 0.5}, 1e-12);
        CHECK(d.kept.size() == 3);
        CHECK(d.passed.empty());
        CHECK(d.rotations.empty());
    }
    SECTION("repeated eigenvalues rotate z mass onto one representative") {
        // Four disjoint edges on 8 nodes: eigenvalues {0 x4, 2 x4}.
        GraphSpec g;
        g.n = 8;
        for (std::size_t i = 1; i <= 7; i += 2) g.edges.push_back({i, i + 1, 1.0});
        const auto base = dense_eigh(build_laplacian(g).m);
        Rng rng(41);
        std::vector<double> v(8);
        for (auto& x : v) x = rng.gaussian();
        const auto z = matvec_t(base.u, v);
        const double rho = 0.9;
        const auto p = perturb_spectrum(base.lambda, z, rho, 1e-12);
        CHECK(p.deflation.rotations.size() >= 6);

        // Reassembled spectrum matches the dense oracle.
        Matrix lr = build_laplacian(g).m;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) lr(i, j) += rho * (v[i] * v[j]);
        const auto oracle = dense_eigh(lr);
        for (std::size_t k = 0; k < 8; ++k)
            CHECK(p.mu[k] == Approx(oracle.lambda[k]).margin(1e-9));
    }
}

TEST_CASE("normalizers") {
    SECTION("n = 2 case") {
        const double r = 1.0 / std::sqrt(2.0);
        const std::vector<double> lambda{0.0, 2.0};
        const auto mu = secular_eigenvalues(lambda, {r, r}, 1.0);
        const auto a = normalizers(lambda, mu, {r, r});
        CHECK(a[0] == Approx(0.525731112119).margin(1e-9));
        CHECK(a[0] > 0.0);
        CHECK(a[1] > 0.0);
    }
    SECTION("single entry") {
        const auto a = normalizers({1.0}, {1.0 + 0.37}, {1.0});
        CHECK(a[0] == Approx(0.37).margin(1e-15));
    }
    SECTION("collision rejected") {
        CHECK_THROWS_AS(normalizers({1.0, 2.0}, {2.0, 3.0}, {0.5, 0.5}), std::domain_error);
    }
}

TEST_CASE("secular plus deflation agrees with the dense solver") {
    Rng rng(53);
    int done = 0;
    for (std::size_t n : {4, 8, 16, 29, 64}) {
        const auto base = path_spectrum(n);
        for (int rep = 0; rep < 24; ++rep) {
            const auto u = random_update(n, rng);
            const auto v = u.direction(n);
            const auto z = matvec_t(base.u, v);
            const auto p = perturb_spectrum(base.lambda, z, u.rho);
            const auto lr = apply_rank_one(path_laplacian(n), u);
            const auto oracle = dense_eigh(lr.m);
            for (std::size_t k = 0; k < n; ++k)
                REQUIRE(p.mu[k] == Approx(oracle.lambda[k]).margin(1e-9));
            ++done;
        }
    }
    CHECK(done >= 100);
}

TEST_CASE("interleaving holds strictly on non-deflated indices") {
    Rng rng(59);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform() * 61.0);
        const auto base = path_spectrum(n);
        const auto u = random_update(n, rng);
        const auto v = u.direction(n);
        const auto z = matvec_t(base.u, v);
        const auto p = perturb_spectrum(base.lambda, z, u.rho);
        const auto& sub_l = p.sub_lambda;
        const auto& sub_m = p.sub_mu;
        for (std::size_t i = 0; i < sub_m.size(); ++i) {
            if (u.rho > 0.0) {
                REQUIRE(sub_m[i] > sub_l[i]);
                if (i + 1 < sub_m.size()) REQUIRE(sub_m[i] < sub_l[i + 1]);
            } else {
                REQUIRE(sub_m[i] < sub_l[i]);
                if (i > 0) REQUIRE(sub_m[i] > sub_l[i - 1]);
            }
        }
    }
}
