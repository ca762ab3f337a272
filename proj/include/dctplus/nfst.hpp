#ifndef DCTPLUS_NFST_HPP
#define DCTPLUS_NFST_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace dctplus {

namespace detail {

/// Smallest 5-smooth integer >= target that is divisible by 4; keeps every
/// FFT length on FFTW's fast radix-2/3/5 code paths.
inline std::size_t next_fast_fft_size(std::size_t target) {
    for (std::size_t g = (target + 3) / 4 * 4;; g += 4) {
        std::size_t r = g;
        for (std::size_t f : {2, 3, 5})
            while (r % f == 0) r /= f;
        if (r == 1) return g;
    }
}

/// RAII wrapper over fftw_malloc'd complex storage. FFTW plans created on
/// aligned arrays may only execute on arrays with the same alignment, so the
/// scratch buffers come from fftw_malloc as well (this keeps the SIMD code
/// paths enabled).
class FftwComplexBuffer {
  public:
    FftwComplexBuffer() = default;
    ~FftwComplexBuffer() {
        if (p_) fftw_free(p_);
    }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer(FftwComplexBuffer&& o) noexcept : p_(o.p_), n_(o.n_) {
        o.p_ = nullptr;
        o.n_ = 0;
    }
    FftwComplexBuffer& operator=(FftwComplexBuffer&& o) noexcept {
        if (this != &o) {
            if (p_) fftw_free(p_);
            p_ = o.p_;
            n_ = o.n_;
            o.p_ = nullptr;
            o.n_ = 0;
        }
        return *this;
    }

    fftw_complex* ensure(std::size_t n) {
        if (n_ < n) {
            if (p_) fftw_free(p_);
            p_ = fftw_alloc_complex(n);
            n_ = n;
        }
        return p_;
    }

  private:
    fftw_complex* p_ = nullptr;
    std::size_t n_ = 0;
};

} // namespace detail

/// Caller-owned scratch for NfstPlan execution.
struct NfstScratch {
    detail::FftwComplexBuffer f, g;
};

/// Nonuniform fast sine transform: evaluates S(theta_i) = sum_{k=1}^{m} c_k sin(k theta_i)
/// at arbitrary angles theta_i in (0, pi) with a requested precision epsilon,
/// in the per-entry sense |result_i - exact_i| <= epsilon * ||c||_1.
///
/// Realization: odd extension of c to modes -m..m, deconvolution by a
/// periodized Gaussian, one oversampled complex FFT (grid >= 4(m+1), i.e. at
/// least 2x oversampling of the odd-extended length), then local Gaussian
/// interpolation around each target. Kernel parameters follow the classic
/// Gaussian-gridding analysis: error ~ exp(-2 pi halfwidth / 3) at 2x
/// oversampling, so the half-width grows with log(1/epsilon). All spreading
/// weights are computed at plan time (the targets are fixed), so execution is
/// one FFT plus a short dot product per target; weight storage is
/// O(|theta| log(1/epsilon)).
///
/// Below a fixed work cutoff the plan instead stores the m x |theta| sine
/// matrix and evaluates exactly; at those sizes the direct product beats the
/// FFT route outright (the usual small-size kernel switch). The asymptotic
/// path is unaffected.
///
/// Plans are immutable after construction and may be shared across threads;
/// exec/adjoint write only to caller-provided buffers.
class NfstPlan {
  public:
    NfstPlan(std::vector<double> theta, std::size_t m, double epsilon)
        : m_(m), theta_(std::move(theta)), epsilon_(epsilon) {
        if (m < 1) throw std::invalid_argument("NfstPlan: need m >= 1");
        if (!(epsilon > 0.0) || !(epsilon < 1.0))
            throw std::invalid_argument("NfstPlan: epsilon must lie in (0, 1)");
        for (double t : theta_)
            if (!(t > 0.0) || !(t < std::numbers::pi))
                throw std::invalid_argument("NfstPlan: angles must lie strictly in (0, pi)");

        halfwidth_ = static_cast<std::size_t>(std::ceil(1.15 * std::log10(1.0 / epsilon))) + 3;
        if (halfwidth_ < 2) halfwidth_ = 2;

        if (m_ * std::max<std::size_t>(theta_.size(), 1) <= kDenseWorkCutoff) {
            dense_ = true;
            sines_.resize(theta_.size() * m_);
            for (std::size_t i = 0; i < theta_.size(); ++i)
                for (std::size_t k = 1; k <= m_; ++k)
                    sines_[i * m_ + (k - 1)] = std::sin(static_cast<double>(k) * theta_[i]);
            return;
        }

        grid_ = detail::next_fast_fft_size(4 * (m_ + 1));
        const double logical = 2.0 * static_cast<double>(m_ + 1);
        const double over = static_cast<double>(grid_) / logical; // >= 2
        tau_ = std::numbers::pi * static_cast<double>(halfwidth_) /
               (logical * logical * over * (over - 0.5));

        const double h = 2.0 * std::numbers::pi / static_cast<double>(grid_);
        inv_phi_.resize(m_ + 1, 0.0);
        const double norm = static_cast<double>(grid_) * std::sqrt(tau_ / std::numbers::pi);
        for (std::size_t k = 1; k <= m_; ++k)
            inv_phi_[k] = std::exp(static_cast<double>(k) * static_cast<double>(k) * tau_) / norm;

        // Tap window per target: 2*halfwidth+1 grid points around the nearest
        // node, or the whole circle when the window covers it (small grids).
        // Weights are plain Gaussians in the local case; the full-circle case
        // needs the periodized kernel because tau is large there.
        taps_ = std::min(2 * halfwidth_ + 1, grid_);
        const bool full_circle = taps_ == grid_;
        start_.resize(theta_.size());
        weights_.resize(theta_.size() * taps_);
        for (std::size_t i = 0; i < theta_.size(); ++i) {
            double* w = weights_.data() + i * taps_;
            if (full_circle) {
                start_[i] = 0;
                for (std::size_t t = 0; t < grid_; ++t)
                    w[t] = kernel_periodized(theta_[i] - static_cast<double>(t) * h);
                continue;
            }
            const auto ell0 = static_cast<long>(std::lround(theta_[i] / h));
            const long lo = ell0 - static_cast<long>(halfwidth_);
            start_[i] = static_cast<std::size_t>((lo % static_cast<long>(grid_) +
                                                  static_cast<long>(grid_)) %
                                                 static_cast<long>(grid_));
            for (std::size_t t = 0; t < taps_; ++t) {
                const double d = theta_[i] - static_cast<double>(lo + static_cast<long>(t)) * h;
                w[t] = std::exp(-d * d / (4.0 * tau_));
            }
        }

        detail::FftwComplexBuffer a, b;
        fft_ = fftw_plan_dft_1d(static_cast<int>(grid_), a.ensure(grid_), b.ensure(grid_),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fft_) throw std::runtime_error("NfstPlan: FFTW planning failed");
    }

    ~NfstPlan() {
        if (fft_) fftw_destroy_plan(fft_);
    }

    NfstPlan(const NfstPlan&) = delete;
    NfstPlan& operator=(const NfstPlan&) = delete;
    NfstPlan(NfstPlan&& o) noexcept { *this = std::move(o); }
    NfstPlan& operator=(NfstPlan&& o) noexcept {
        if (this != &o) {
            if (fft_) fftw_destroy_plan(fft_);
            m_ = o.m_;
            theta_ = std::move(o.theta_);
            epsilon_ = o.epsilon_;
            grid_ = o.grid_;
            halfwidth_ = o.halfwidth_;
            tau_ = o.tau_;
            taps_ = o.taps_;
            dense_ = o.dense_;
            sines_ = std::move(o.sines_);
            inv_phi_ = std::move(o.inv_phi_);
            start_ = std::move(o.start_);
            weights_ = std::move(o.weights_);
            fft_ = o.fft_;
            o.fft_ = nullptr;
        }
        return *this;
    }

    std::size_t harmonics() const { return m_; }
    std::size_t points() const { return theta_.size(); }
    double epsilon() const { return epsilon_; }
    std::size_t kernel_halfwidth() const { return halfwidth_; }
    const std::vector<double>& theta() const { return theta_; }

    /// result_i = sum_k c_k sin(k theta_i) within epsilon * ||c||_1.
    void exec_into(const std::vector<double>& c, std::vector<double>& out,
                   NfstScratch& scratch) const {
        if (c.size() != m_) throw std::invalid_argument("nfst_exec: coefficient length mismatch");
        out.resize(theta_.size());
        if (theta_.empty()) return;

        if (dense_) {
            for (std::size_t i = 0; i < theta_.size(); ++i) {
                const double* row = sines_.data() + i * m_;
                double acc = 0.0;
                for (std::size_t k = 0; k < m_; ++k) acc += row[k] * c[k];
                out[i] = acc;
            }
            return;
        }

        fftw_complex* f = scratch.f.ensure(grid_);
        fftw_complex* g = scratch.g.ensure(grid_);
        for (std::size_t l = 0; l < grid_; ++l) f[l][0] = f[l][1] = 0.0;
        for (std::size_t k = 1; k <= m_; ++k) {
            const double v = c[k - 1] * inv_phi_[k];
            f[k][0] += v;
            f[grid_ - k][0] -= v;
        }
        fftw_execute_dft(fft_, f, g);

        // The odd-extended spectrum makes g purely imaginary (up to rounding);
        // only the imaginary parts enter the result.
        for (std::size_t i = 0; i < theta_.size(); ++i) {
            const double* w = weights_.data() + i * taps_;
            const std::size_t run1 = std::min(taps_, grid_ - start_[i]);
            double acc = 0.0;
            const fftw_complex* gs = g + start_[i];
            for (std::size_t t = 0; t < run1; ++t) acc += w[t] * gs[t][1];
            for (std::size_t t = run1; t < taps_; ++t) acc += w[t] * g[t - run1][1];
            out[i] = 0.5 * acc;
        }
    }

    std::vector<double> exec(const std::vector<double>& c) const {
        std::vector<double> out;
        NfstScratch scratch;
        exec_into(c, out, scratch);
        return out;
    }

    /// Transpose map: b_k = sum_i v_i sin(k theta_i) within epsilon * ||v||_1.
    void adjoint_into(const std::vector<double>& v, std::vector<double>& b,
                      NfstScratch& scratch) const {
        if (v.size() != theta_.size())
            throw std::invalid_argument("nfst_adjoint: value length mismatch");
        b.assign(m_, 0.0);
        if (theta_.empty()) return;

        if (dense_) {
            for (std::size_t i = 0; i < theta_.size(); ++i) {
                const double* row = sines_.data() + i * m_;
                const double vi = v[i];
                for (std::size_t k = 0; k < m_; ++k) b[k] += row[k] * vi;
            }
            return;
        }

        fftw_complex* f = scratch.f.ensure(grid_);
        fftw_complex* g = scratch.g.ensure(grid_);
        for (std::size_t l = 0; l < grid_; ++l) f[l][0] = f[l][1] = 0.0;
        for (std::size_t i = 0; i < theta_.size(); ++i) {
            const double* w = weights_.data() + i * taps_;
            const std::size_t run1 = std::min(taps_, grid_ - start_[i]);
            fftw_complex* fs = f + start_[i];
            const double vi = v[i];
            for (std::size_t t = 0; t < run1; ++t) fs[t][0] += vi * w[t];
            for (std::size_t t = run1; t < taps_; ++t) f[t - run1][0] += vi * w[t];
        }
        fftw_execute_dft(fft_, f, g);
        for (std::size_t k = 1; k <= m_; ++k) b[k - 1] = g[k][1] * inv_phi_[k];
    }

    std::vector<double> adjoint(const std::vector<double>& v) const {
        std::vector<double> b;
        NfstScratch scratch;
        adjoint_into(v, b, scratch);
        return b;
    }

  private:
    /// Periodized Gaussian; with the large tau of small grids several image
    /// terms contribute above epsilon.
    double kernel_periodized(double d) const {
        double s = 0.0;
        for (int r = -2; r <= 2; ++r) {
            const double x = d - 2.0 * std::numbers::pi * static_cast<double>(r);
            s += std::exp(-x * x / (4.0 * tau_));
        }
        return s;
    }

    // Below this m * |theta| product the exact sine-matrix product is cheaper
    // than deconvolve + FFT + spread on any plausible hardware.
    static constexpr std::size_t kDenseWorkCutoff = 4096;

    std::size_t m_ = 0;
    std::vector<double> theta_;
    double epsilon_ = 0.0;
    std::size_t grid_ = 0;
    std::size_t halfwidth_ = 0;
    double tau_ = 0.0;
    std::size_t taps_ = 0;
    bool dense_ = false;
    std::vector<double> sines_;
    std::vector<double> inv_phi_;
    std::vector<std::size_t> start_;
    std::vector<double> weights_;
    fftw_plan fft_ = nullptr;
};

inline NfstPlan plan_nfst(std::vector<double> theta, std::size_t m, double epsilon) {
    return NfstPlan(std::move(theta), m, epsilon);
}

inline std::vector<double> nfst_exec(const NfstPlan& plan, const std::vector<double>& c) {
    return plan.exec(c);
}

inline std::vector<double> nfst_adjoint(const NfstPlan& plan, const std::vector<double>& v) {
    return plan.adjoint(v);
}

/// Exact O(m * |theta|) summation; the reference every error contract is
/// checked against.
inline std::vector<double> nfst_direct(const std::vector<double>& theta,
                                       const std::vector<double>& c) {
    std::vector<double> out(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 1; k <= c.size(); ++k)
            s += c[k - 1] * std::sin(static_cast<double>(k) * theta[i]);
        out[i] = s;
    }
    return out;
}

/// Direct transpose map, for testing nfst_adjoint.
inline std::vector<double> nfst_adjoint_direct(const std::vector<double>& theta,
                                               const std::vector<double>& v, std::size_t m) {
    std::vector<double> b(m, 0.0);
    for (std::size_t k = 1; k <= m; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i)
            s += v[i] * std::sin(static_cast<double>(k) * theta[i]);
        b[k - 1] = s;
    }
    return b;
}

} // namespace dctplus

#endif
