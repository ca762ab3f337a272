#ifndef DCTPLUS_CAUCHY_HPP
#define DCTPLUS_CAUCHY_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dctplus/graph.hpp"
#include "dctplus/matrix.hpp"
#include "dctplus/spectral.hpp"

namespace dctplus {

inline constexpr double kCauchyPoleTol = 1e-14;

/// C(mu, lambda) with entries 1/(mu_i - lambda_j). The node and pole vectors
/// must not share entries.
inline Matrix cauchy_matrix(const std::vector<double>& mu, const std::vector<double>& lambda) {
    Matrix c(mu.size(), lambda.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            const double d = mu[i] - lambda[j];
            if (std::abs(d) <= kCauchyPoleTol)
                throw std::domain_error("cauchy_matrix: singular pole (mu and lambda share an entry)");
            c(i, j) = 1.0 / d;
        }
    return c;
}

/// Dense Cauchy matrix-vector product p_i = sum_j s_j/(mu_i - lambda_j),
/// plain left-to-right summation. This is the NMVP baseline and the fallback
/// for non-path base graphs.
inline std::vector<double> cauchy_nmvp(const std::vector<double>& mu,
                                       const std::vector<double>& lambda,
                                       const std::vector<double>& s) {
    if (s.size() != lambda.size()) throw std::invalid_argument("cauchy_nmvp: size mismatch");
    std::vector<double> p(mu.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            const double d = mu[i] - lambda[j];
            if (std::abs(d) <= kCauchyPoleTol)
                throw std::domain_error("cauchy_nmvp: singular pole");
            acc += s[j] / d;
        }
        p[i] = acc;
    }
    return p;
}

namespace detail {

/// Base eigenvector matrix with the deflation's Givens rotations applied.
inline Matrix rotated_basis(const Matrix& u, const Deflation& d) {
    Matrix r = u;
    for (const auto& g : d.rotations) {
        for (std::size_t i = 0; i < r.rows(); ++i) {
            const double a = r(i, g.into), b = r(i, g.from);
            r(i, g.into) = g.c * a + g.s * b;
            r(i, g.from) = -g.s * a + g.c * b;
        }
    }
    return r;
}

/// Apply the deflation rotations to a coefficient vector (the transpose of
/// what rotated_basis does to columns).
inline void rotate_coefficients(const Deflation& d, std::vector<double>& p) {
    for (const auto& g : d.rotations) {
        const double a = p[g.into], b = p[g.from];
        p[g.into] = g.c * a + g.s * b;
        p[g.from] = -g.s * a + g.c * b;
    }
}

/// Unsigned eigenvector basis of the perturbed operator: pass-through slots
/// are (rotated) base columns, active slots follow the rank-one eigenvector
/// formula a * U (diag lambda - mu I)^{-1} z up to the global sign that the
/// caller fixes per column. mul_u multiplies the (rotated) base basis by a
/// coefficient vector.
inline Matrix assemble_unsigned_basis(
    const std::vector<double>& lambda, const PerturbedSpectrum& ps,
    const std::function<std::vector<double>(const std::vector<double>&)>& mul_u) {
    const std::size_t n = lambda.size();
    Matrix x(n, n);
    std::vector<double> y(n);
    for (std::size_t s = 0; s < ps.slots.size(); ++s) {
        std::fill(y.begin(), y.end(), 0.0);
        if (ps.slots[s].passthrough) {
            y[ps.slots[s].idx] = 1.0;
        } else {
            const double nu = ps.sub_mu[ps.slots[s].idx];
            for (std::size_t j = 0; j < n; ++j)
                if (ps.z[j] != 0.0) y[j] = ps.a[s] * ps.z[j] / (lambda[j] - nu);
        }
        const std::vector<double> col = mul_u(y);
        for (std::size_t i = 0; i < n; ++i) x(i, s) = col[i];
    }
    return x;
}

} // namespace detail

/// Structured factorization of the perturbed GFT basis,
/// X = U diag(z) C(lambda, mu) diag(sigma .* a), with pass-through columns for
/// deflated eigenpairs. sigma holds the per-column signs that realize the
/// largest-entry-positive convention.
struct CauchyFactorization {
    std::vector<double> lambda;
    PerturbedSpectrum spec;
    std::vector<double> sigma;

    std::size_t size() const { return lambda.size(); }
    double rho() const { return spec.rho; }
    const std::vector<double>& mu() const { return spec.mu; }
};

inline CauchyFactorization factorize(const SpectralBasis& base, const RankOneUpdate& u,
                                     double tau = 1e-12) {
    const std::size_t n = base.lambda.size();
    const std::vector<double> v = u.direction(n);
    const std::vector<double> z = matvec_t(base.u, v);

    CauchyFactorization f;
    f.lambda = base.lambda;
    f.spec = perturb_spectrum(base.lambda, z, u.rho, tau);

    const Matrix u_eff = detail::rotated_basis(base.u, f.spec.deflation);
    const Matrix x = detail::assemble_unsigned_basis(
        f.lambda, f.spec, [&](const std::vector<double>& y) { return matvec(u_eff, y); });
    f.sigma.resize(n);
    for (std::size_t s = 0; s < n; ++s) f.sigma[s] = column_sign_convention(x, s);
    return f;
}

/// Dense eigenvector matrix realized by the factorization. Columns are unit
/// norm and follow the sign convention stored in the factorization.
inline Matrix synthesize_basis(const CauchyFactorization& f, const Matrix& base_u) {
    if (base_u.rows() != f.size() || base_u.cols() != f.size())
        throw std::invalid_argument("synthesize_basis: base dimension mismatch");
    const Matrix u_eff = detail::rotated_basis(base_u, f.spec.deflation);
    Matrix x = detail::assemble_unsigned_basis(
        f.lambda, f.spec, [&](const std::vector<double>& y) { return matvec(u_eff, y); });
    for (std::size_t s = 0; s < f.sigma.size(); ++s)
        if (f.sigma[s] < 0.0)
            for (std::size_t i = 0; i < x.rows(); ++i) x(i, s) = -x(i, s);
    return x;
}

// --- rank-k chains -----------------------------------------------------------

/// One link of a rank-k chain: the spectrum entering the stage and the
/// factorization of this stage's rank-one update on top of it.
struct ChainStage {
    std::vector<double> base_vals;
    PerturbedSpectrum spec;
    std::vector<double> sigma;
};

struct ChainedFactorization {
    std::size_t n = 0;
    Matrix base_u;
    std::vector<double> base_lambda;
    std::vector<ChainStage> stages;
    Matrix x;               // final basis, signed
    std::vector<double> mu; // final eigenvalues, ascending
};

/// Chain of rank-one factorizations for L~ + sum_j rho_j v_j v_j^T. Each
/// stage's z is computed against the materialized previous basis and each
/// stage's Cauchy product runs through cauchy_nmvp.
inline ChainedFactorization compose_rank_k(const SpectralBasis& base,
                                           const std::vector<RankOneUpdate>& updates,
                                           double tau = 1e-12) {
    if (updates.empty()) throw std::invalid_argument("compose_rank_k: need k >= 1 updates");
    ChainedFactorization chain;
    chain.n = base.lambda.size();
    chain.base_u = base.u;
    chain.base_lambda = base.lambda;

    Matrix cur_u = base.u;
    std::vector<double> cur_vals = base.lambda;
    for (std::size_t r = 0; r < updates.size(); ++r) {
        try {
            const std::vector<double> v = updates[r].direction(chain.n);
            const std::vector<double> z = matvec_t(cur_u, v);
            ChainStage stage;
            stage.base_vals = cur_vals;
            stage.spec = perturb_spectrum(cur_vals, z, updates[r].rho, tau);
            const Matrix u_eff = detail::rotated_basis(cur_u, stage.spec.deflation);
            Matrix x = detail::assemble_unsigned_basis(
                stage.base_vals, stage.spec,
                [&](const std::vector<double>& y) { return matvec(u_eff, y); });
            stage.sigma.resize(chain.n);
            for (std::size_t s = 0; s < chain.n; ++s) {
                stage.sigma[s] = column_sign_convention(x, s);
                if (stage.sigma[s] < 0.0)
                    for (std::size_t i = 0; i < chain.n; ++i) x(i, s) = -x(i, s);
            }
            cur_vals = stage.spec.mu;
            cur_u = x;
            chain.stages.push_back(std::move(stage));
        } catch (const std::exception& e) {
            throw std::runtime_error("compose_rank_k: stage " + std::to_string(r + 1) + ": " +
                                     e.what());
        }
    }
    chain.x = cur_u;
    chain.mu = cur_vals;
    return chain;
}

/// Forward transform through the chain: U^T s, then one Cauchy stage per
/// update.
inline std::vector<double> chain_forward(const ChainedFactorization& f,
                                         const std::vector<double>& s) {
    if (s.size() != f.n) throw std::invalid_argument("chain_forward: size mismatch");
    std::vector<double> p = matvec_t(f.base_u, s);
    for (const ChainStage& st : f.stages) {
        detail::rotate_coefficients(st.spec.deflation, p);
        std::vector<double> t(st.spec.sub_z.size());
        for (std::size_t r = 0; r < st.spec.deflation.kept.size(); ++r)
            t[r] = st.spec.sub_z[r] * p[st.spec.deflation.kept[r]];
        std::vector<double> q;
        if (!t.empty()) q = cauchy_nmvp(st.spec.sub_mu, st.spec.sub_lambda, t);
        std::vector<double> out(f.n);
        for (std::size_t slot = 0; slot < st.spec.slots.size(); ++slot) {
            const SlotRef ref = st.spec.slots[slot];
            out[slot] = ref.passthrough ? st.sigma[slot] * p[ref.idx]
                                        : -st.sigma[slot] * st.spec.a[slot] * q[ref.idx];
        }
        p = std::move(out);
    }
    return p;
}

} // namespace dctplus

#endif
