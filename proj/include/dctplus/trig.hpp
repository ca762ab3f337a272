#ifndef DCTPLUS_TRIG_HPP
#define DCTPLUS_TRIG_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace dctplus {

enum class TrigKind { dct2, idct2, dst1 };

/// FFT-backed plan for one transform kind at one length.
///
/// Conventions (these are the ones the factorization pipeline relies on, and
/// they differ from FFTW's raw kernels):
///  - dct2:  p = U^T s with U the orthonormal DCT-II basis, so the transform
///           is an isometry and a constant signal maps to (c*sqrt(n), 0, ...).
///  - idct2: exact inverse (= adjoint) of dct2.
///  - dst1:  c_l = 2 * sum_{j=1}^{m} h_j sin(l j pi / (m+1)), l = 1..m.
///           The explicit factor 2 matches FFTW's RODFT00 and makes dst1 its
///           own inverse up to the scale 2(m+1).
///
/// Lengths up to 16 run through a precomputed dense matrix instead of FFTW;
/// at those sizes the n^2 product is faster than the generic r2r path.
///
/// Plans are immutable after construction and may be shared across threads;
/// execute() writes only to caller-provided buffers.
class TrigPlan {
  public:
    TrigPlan(TrigKind kind, std::size_t len) : kind_(kind), len_(len) {
        if (len < 1) throw std::invalid_argument("TrigPlan: length must be positive");
        // FFTW ships hard-coded 8-point REDFT codelets that beat the dense
        // product; every other length up to the cutoff goes dense.
        const bool use_dense =
            len <= kDenseCutoff && !(len == 8 && kind != TrigKind::dst1);
        if (use_dense) {
            fill_dense_matrix();
            return;
        }
        std::vector<double> a(len), b(len);
        fftw_r2r_kind k;
        switch (kind) {
            case TrigKind::dct2: k = FFTW_REDFT10; break;
            case TrigKind::idct2: k = FFTW_REDFT01; break;
            case TrigKind::dst1: k = FFTW_RODFT00; break;
            default: throw std::invalid_argument("TrigPlan: unknown kind");
        }
        plan_ = fftw_plan_r2r_1d(static_cast<int>(len), a.data(), b.data(), k,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan_) throw std::runtime_error("TrigPlan: FFTW planning failed");
    }

    ~TrigPlan() {
        if (plan_) fftw_destroy_plan(plan_);
    }

    TrigPlan(const TrigPlan&) = delete;
    TrigPlan& operator=(const TrigPlan&) = delete;
    TrigPlan(TrigPlan&& o) noexcept
        : kind_(o.kind_), len_(o.len_), plan_(o.plan_), dense_(std::move(o.dense_)) {
        o.plan_ = nullptr;
    }
    TrigPlan& operator=(TrigPlan&& o) noexcept {
        if (this != &o) {
            if (plan_) fftw_destroy_plan(plan_);
            kind_ = o.kind_;
            len_ = o.len_;
            plan_ = o.plan_;
            dense_ = std::move(o.dense_);
            o.plan_ = nullptr;
        }
        return *this;
    }

    TrigKind kind() const { return kind_; }
    std::size_t length() const { return len_; }

    /// in and out must hold length() doubles and must not alias. work is a
    /// scratch buffer of the same length, required for idct2 only.
    void execute(const double* in, double* out, double* work = nullptr) const {
        if (!dense_.empty()) {
            for (std::size_t i = 0; i < len_; ++i) {
                const double* row = dense_.data() + i * len_;
                double acc = 0.0;
                for (std::size_t j = 0; j < len_; ++j) acc += row[j] * in[j];
                out[i] = acc;
            }
            return;
        }
        switch (kind_) {
            case TrigKind::dct2: {
                fftw_execute_r2r(plan_, const_cast<double*>(in), out);
                const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(len_));
                for (std::size_t i = 0; i < len_; ++i) out[i] *= s;
                out[0] *= std::numbers::sqrt2 / 2.0; // 1/sqrt(2)
                break;
            }
            case TrigKind::idct2: {
                if (!work) throw std::invalid_argument("TrigPlan: idct2 needs a work buffer");
                for (std::size_t i = 0; i < len_; ++i) work[i] = in[i];
                work[0] *= std::numbers::sqrt2;
                fftw_execute_r2r(plan_, work, out);
                const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(len_));
                for (std::size_t i = 0; i < len_; ++i) out[i] *= s;
                break;
            }
            case TrigKind::dst1: {
                fftw_execute_r2r(plan_, const_cast<double*>(in), out);
                break;
            }
        }
    }

    std::vector<double> execute(const std::vector<double>& in) const {
        if (in.size() != len_) throw std::invalid_argument("TrigPlan: size mismatch with plan");
        std::vector<double> out(len_);
        if (kind_ == TrigKind::idct2) {
            std::vector<double> work(len_);
            execute(in.data(), out.data(), work.data());
        } else {
            execute(in.data(), out.data());
        }
        return out;
    }

  private:
    void fill_dense_matrix() {
        dense_.resize(len_ * len_);
        const double pi = std::numbers::pi;
        const double nd = static_cast<double>(len_);
        switch (kind_) {
            case TrigKind::dct2:
            case TrigKind::idct2: {
                const double scale = std::sqrt(2.0 / nd);
                for (std::size_t k = 0; k < len_; ++k) {
                    const double ck = (k == 0) ? 1.0 / std::numbers::sqrt2 : 1.0;
                    for (std::size_t j = 0; j < len_; ++j) {
                        const double u =
                            ck * scale *
                            std::cos(pi * static_cast<double>(k) *
                                     (2.0 * static_cast<double>(j) + 1.0) / (2.0 * nd));
                        // dct2 applies U^T (rows indexed by k), idct2 applies U.
                        if (kind_ == TrigKind::dct2)
                            dense_[k * len_ + j] = u;
                        else
                            dense_[j * len_ + k] = u;
                    }
                }
                break;
            }
            case TrigKind::dst1: {
                const double denom = nd + 1.0;
                for (std::size_t l = 1; l <= len_; ++l)
                    for (std::size_t j = 1; j <= len_; ++j)
                        dense_[(l - 1) * len_ + (j - 1)] =
                            2.0 * std::sin(static_cast<double>(l) * static_cast<double>(j) *
                                           pi / denom);
                break;
            }
        }
    }

    static constexpr std::size_t kDenseCutoff = 16;

    TrigKind kind_;
    std::size_t len_;
    fftw_plan plan_ = nullptr;
    std::vector<double> dense_;
};

/// One-shot orthonormal DCT-II (p = U^T s).
inline std::vector<double> dct2(const std::vector<double>& s) {
    if (s.size() < 2) throw std::invalid_argument("dct2: need length >= 2");
    return TrigPlan(TrigKind::dct2, s.size()).execute(s);
}

/// One-shot inverse of dct2.
inline std::vector<double> idct2(const std::vector<double>& p) {
    if (p.size() < 2) throw std::invalid_argument("idct2: need length >= 2");
    return TrigPlan(TrigKind::idct2, p.size()).execute(p);
}

/// One-shot factor-2 DST-I of a length-(n-1) vector.
inline std::vector<double> dst1(const std::vector<double>& h) {
    if (h.empty()) throw std::invalid_argument("dst1: empty input");
    return TrigPlan(TrigKind::dst1, h.size()).execute(h);
}

/// Chebyshev polynomial of the second kind, U_m(x), by recurrence.
inline double chebyshev_u(unsigned m, double x) {
    if (m == 0) return 1.0;
    double prev = 1.0, cur = 2.0 * x;
    for (unsigned k = 2; k <= m; ++k) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Roots of U_{n-1}: y_k = cos(k pi / n), k = 1..n-1, descending in value.
inline std::vector<double> u_roots(std::size_t n) {
    if (n < 2) throw std::invalid_argument("u_roots: need n >= 2");
    std::vector<double> y(n - 1);
    for (std::size_t k = 1; k < n; ++k)
        y[k - 1] = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    return y;
}

} // namespace dctplus

#endif
