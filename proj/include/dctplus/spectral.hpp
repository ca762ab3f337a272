#ifndef DCTPLUS_SPECTRAL_HPP
#define DCTPLUS_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dctplus/graph.hpp"
#include "dctplus/matrix.hpp"

namespace dctplus {

/// Eigendecomposition L = U diag(lambda) U^T with lambda ascending and
/// orthonormal columns. U's columns are the graph Fourier basis.
struct SpectralBasis {
    std::vector<double> lambda;
    Matrix u;
};

/// Sign to multiply a column by so that its largest-magnitude entry becomes
/// positive. Ties (within 1e-12 relative) resolve to the lowest index, which
/// keeps the convention deterministic when symmetric entries agree in
/// magnitude up to rounding.
inline double column_sign_convention(const Matrix& m, std::size_t col) {
    double peak = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) peak = std::max(peak, std::abs(m(i, col)));
    if (peak == 0.0) return 1.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (std::abs(m(i, col)) >= peak * (1.0 - 1e-12)) return m(i, col) < 0.0 ? -1.0 : 1.0;
    return 1.0;
}

inline void fix_column_signs(Matrix& m) {
    for (std::size_t k = 0; k < m.cols(); ++k) {
        if (column_sign_convention(m, k) < 0.0)
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, k) = -m(i, k);
    }
}

/// Closed-form spectrum of the unit-weight path graph: lambda_k = 2 - 2cos(k pi/n)
/// and the orthonormal DCT-II basis (as printed; no sign normalization).
inline SpectralBasis path_spectrum(std::size_t n) {
    if (n < 2) throw std::invalid_argument("path_spectrum: need n >= 2");
    SpectralBasis b;
    b.lambda.resize(n);
    b.u = Matrix(n, n);
    const double pi = std::numbers::pi;
    const double nd = static_cast<double>(n);
    const double scale = std::sqrt(2.0 / nd);
    for (std::size_t k = 0; k < n; ++k) {
        b.lambda[k] = 2.0 - 2.0 * std::cos(static_cast<double>(k) * pi / nd);
        const double ck = (k == 0) ? 1.0 / std::numbers::sqrt2 : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            b.u(j, k) = ck * scale *
                        std::cos(pi * static_cast<double>(k) * (2.0 * static_cast<double>(j) + 1.0) /
                                 (2.0 * nd));
    }
    b.lambda[0] = 0.0;
    return b;
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations. This is the
/// dense oracle the rest of the library is tested against, so it stays
/// self-contained. Input must be exactly symmetric.
inline SpectralBasis dense_eigh(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) throw std::invalid_argument("dense_eigh: matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a(i, j) != a(j, i)) throw std::invalid_argument("dense_eigh: matrix not symmetric");

    Matrix b = a;
    Matrix v = Matrix::identity(n);
    const double fro = frobenius_norm(a);
    const double tol = (fro == 0.0) ? 0.0 : 1e-14 * fro;

    auto offdiag = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += b(p, q) * b(p, q);
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 64;
    int sweep = 0;
    while (offdiag() > tol) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("dense_eigh: Jacobi iteration did not converge");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = b(p, q);
                if (apq == 0.0) continue;
                const double theta = (b(q, q) - b(p, p)) / (2.0 * apq);
                double t;
                if (theta >= 0.0)
                    t = 1.0 / (theta + std::sqrt(1.0 + theta * theta));
                else
                    t = -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double bkp = b(k, p), bkq = b(k, q);
                    b(k, p) = c * bkp - s * bkq;
                    b(k, q) = s * bkp + c * bkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double bpk = b(p, k), bqk = b(q, k);
                    b(p, k) = c * bpk - s * bqk;
                    b(q, k) = s * bpk + c * bqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return b(i, i) < b(j, j); });

    SpectralBasis out;
    out.lambda.resize(n);
    out.u = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.lambda[k] = b(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.u(i, k) = v(i, order[k]);
    }
    fix_column_signs(out.u);
    return out;
}

inline SpectralBasis dense_eigh(const GeneralizedLaplacian& l) { return dense_eigh(l.m); }

// --- secular equation --------------------------------------------------------

namespace detail {

struct SecularEval {
    double f;     // 1 + rho * sum z_j^2 / (lambda_j - mu)
    double df;    // derivative, rho * sum z_j^2 / (lambda_j - mu)^2
    double scale; // 1 + |rho| * sum z_j^2 / |lambda_j - mu|
};

inline SecularEval secular_eval(const std::vector<double>& lambda, const std::vector<double>& z,
                                double rho, double mu) {
    double s = 0.0, ds = 0.0, sa = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        const double d = lambda[j] - mu;
        const double t = z[j] * z[j] / d;
        s += t;
        ds += t / d;
        sa += std::abs(t);
    }
    return {1.0 + rho * s, rho * ds, 1.0 + std::abs(rho) * sa};
}

inline double solve_secular_bracket(const std::vector<double>& lambda,
                                    const std::vector<double>& z, double rho, double lo,
                                    double hi) {
    // w is monotone on (lo, hi): increasing for rho > 0, decreasing otherwise.
    const double up = (rho > 0.0) ? 1.0 : -1.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const SecularEval e = secular_eval(lambda, z, rho, x);
        if (std::abs(e.f) <= 1e-15 * e.scale) return x;
        if (up * e.f < 0.0)
            lo = x;
        else
            hi = x;
        const double width = hi - lo;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(lo) + std::abs(hi) + std::numeric_limits<double>::min()))
            return 0.5 * (lo + hi);
        double xn = x - e.f / e.df;
        // Force a bisection step periodically so the bracket always shrinks.
        if (!(xn > lo && xn < hi) || e.df == 0.0 || (it % 4) == 3) xn = 0.5 * (lo + hi);
        x = xn;
    }
    throw std::runtime_error("secular_eigenvalues: no convergence in 200 iterations");
}

} // namespace detail

/// Roots of the secular equation w(mu) = 1 + rho * sum_j z_j^2/(lambda_j - mu),
/// one per interleaving bracket (strictly between consecutive
/// lambda, plus one exterior root on the side of rho's sign). Requires a
/// deflated problem: strictly increasing lambda and no zero z entries.
inline std::vector<double> secular_eigenvalues(const std::vector<double>& lambda,
                                               const std::vector<double>& z, double rho) {
    const std::size_t k = lambda.size();
    if (k == 0) return {};
    if (z.size() != k) throw std::invalid_argument("secular_eigenvalues: size mismatch");
    if (rho == 0.0) throw std::invalid_argument("secular_eigenvalues: rho must be nonzero");
    for (std::size_t j = 0; j < k; ++j) {
        if (z[j] == 0.0)
            throw std::invalid_argument("secular_eigenvalues: zero z component; deflate first");
        if (j + 1 < k && !(lambda[j + 1] > lambda[j]))
            throw std::invalid_argument(
                "secular_eigenvalues: repeated or unsorted eigenvalues; deflate first");
    }

    double zz = 0.0;
    for (double v : z) zz += v * v;

    std::vector<double> mu(k);
    if (k == 1) {
        mu[0] = lambda[0] + rho * zz;
        return mu;
    }
    if (rho > 0.0) {
        for (std::size_t i = 0; i + 1 < k; ++i)
            mu[i] = detail::solve_secular_bracket(lambda, z, rho, lambda[i], lambda[i + 1]);
        mu[k - 1] = detail::solve_secular_bracket(lambda, z, rho, lambda[k - 1],
                                                  lambda[k - 1] + rho * zz);
    } else {
        mu[0] =
            detail::solve_secular_bracket(lambda, z, rho, lambda[0] + rho * zz, lambda[0]);
        for (std::size_t i = 1; i < k; ++i)
            mu[i] = detail::solve_secular_bracket(lambda, z, rho, lambda[i - 1], lambda[i]);
    }
    return mu;
}

// --- deflation ---------------------------------------------------------------

/// Result of deflating a rank-one update problem. `kept` indexes the secular
/// subproblem; `passed` indexes eigenpairs that survive unchanged (mu equals
/// lambda there). Givens rotations merge the z mass of (near-)repeated
/// eigenvalues onto one representative; they act on pairs of base eigenvector
/// columns as u_into' = c u_into + s u_from, u_from' = -s u_into + c u_from.
struct Deflation {
    struct Rotation {
        std::size_t into, from;
        double c, s;
    };
    std::vector<std::size_t> kept, passed;
    std::vector<Rotation> rotations;
    std::vector<double> z_out; // rotated z, exactly zero at passed indices
};

inline Deflation deflate(const std::vector<double>& lambda, const std::vector<double>& z,
                         double tau) {
    if (lambda.size() != z.size()) throw std::invalid_argument("deflate: size mismatch");
    if (tau < 0.0) throw std::invalid_argument("deflate: tau must be nonnegative");
    const std::size_t n = lambda.size();
    Deflation d;
    d.z_out = z;

    double lmax = 0.0;
    for (double v : lambda) lmax = std::max(lmax, std::abs(v));
    const double gap_tol = tau * lmax;

    // Collapse runs of near-equal eigenvalues (chained by neighbor gaps).
    std::size_t run_start = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const bool extend = (j < n) && (lambda[j] - lambda[j - 1] <= gap_tol);
        if (extend) continue;
        for (std::size_t k = run_start + 1; k < j; ++k) {
            const double zr = d.z_out[run_start], zk = d.z_out[k];
            const double h = std::hypot(zr, zk);
            if (h > 0.0) {
                d.rotations.push_back({run_start, k, zr / h, zk / h});
                d.z_out[run_start] = h;
            }
            d.z_out[k] = 0.0;
        }
        run_start = j;
    }

    double znorm = 0.0;
    for (double v : d.z_out) znorm = std::hypot(znorm, v);
    const double z_tol = tau * znorm;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(d.z_out[j]) <= z_tol) {
            d.z_out[j] = 0.0;
            d.passed.push_back(j);
        } else {
            d.kept.push_back(j);
        }
    }
    return d;
}

/// Column normalizers of the rank-one eigenvector formula:
/// a_i = (sum_j z_j^2 / (mu_i - lambda_j)^2)^(-1/2), all positive.
inline std::vector<double> normalizers(const std::vector<double>& lambda,
                                       const std::vector<double>& mu,
                                       const std::vector<double>& z) {
    if (lambda.size() != z.size()) throw std::invalid_argument("normalizers: size mismatch");
    std::vector<double> a(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            const double d = mu[i] - lambda[j];
            if (d == 0.0 && z[j] != 0.0)
                throw std::domain_error("normalizers: mu/lambda collision; deflation missing");
            if (z[j] != 0.0) s += (z[j] / d) * (z[j] / d);
        }
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::domain_error("normalizers: degenerate column");
        a[i] = 1.0 / std::sqrt(s);
    }
    return a;
}

// --- assembled perturbed spectrum --------------------------------------------

/// Where each output coordinate of the perturbed transform comes from:
/// either a pass-through of base eigenpair `idx`, or rank `idx` of the
/// secular subproblem.
struct SlotRef {
    bool passthrough;
    std::size_t idx;
};

/// Everything the factorization needs about L~ + rho v v^T given the base
/// spectrum: full perturbed eigenvalues (ascending), the deflated z, the
/// per-slot normalizers, and the slot map.
struct PerturbedSpectrum {
    std::vector<double> mu;  // full length, ascending
    std::vector<double> z;   // deflated (zeros at passed indices)
    std::vector<double> a;   // per slot; 1.0 for pass-through slots
    std::vector<SlotRef> slots;
    Deflation deflation;
    double rho = 0.0;
    std::vector<double> sub_lambda, sub_z, sub_mu; // active subproblem
};

inline PerturbedSpectrum perturb_spectrum(const std::vector<double>& lambda,
                                          const std::vector<double>& z, double rho,
                                          double tau = 1e-12) {
    PerturbedSpectrum p;
    p.rho = rho;
    p.deflation = deflate(lambda, z, tau);
    p.z = p.deflation.z_out;

    for (std::size_t j : p.deflation.kept) {
        p.sub_lambda.push_back(lambda[j]);
        p.sub_z.push_back(p.z[j]);
    }
    if (!p.sub_lambda.empty()) p.sub_mu = secular_eigenvalues(p.sub_lambda, p.sub_z, rho);
    const std::vector<double> sub_a =
        p.sub_mu.empty() ? std::vector<double>{} : normalizers(p.sub_lambda, p.sub_mu, p.sub_z);

    // Merge pass-through eigenvalues (= lambda at passed indices, already
    // ascending) with the secular roots into one ascending list.
    const auto& passed = p.deflation.passed;
    std::size_t ip = 0, ia = 0;
    const std::size_t n = lambda.size();
    p.mu.reserve(n);
    p.slots.reserve(n);
    p.a.reserve(n);
    while (ip < passed.size() || ia < p.sub_mu.size()) {
        const bool take_pass =
            ia == p.sub_mu.size() ||
            (ip < passed.size() && lambda[passed[ip]] <= p.sub_mu[ia]);
        if (take_pass) {
            p.mu.push_back(lambda[passed[ip]]);
            p.slots.push_back({true, passed[ip]});
            p.a.push_back(1.0);
            ++ip;
        } else {
            p.mu.push_back(p.sub_mu[ia]);
            p.slots.push_back({false, ia});
            p.a.push_back(sub_a[ia]);
            ++ia;
        }
    }
    return p;
}

} // namespace dctplus

#endif
