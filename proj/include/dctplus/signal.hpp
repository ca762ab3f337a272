#ifndef DCTPLUS_SIGNAL_HPP
#define DCTPLUS_SIGNAL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace dctplus {

/// Deterministic random source: mt19937_64 (fixed, standardized constants)
/// plus an explicit Box-Muller transform, so the exact same seed reproduces
/// the exact same signals on any implementation. std::normal_distribution is
/// deliberately avoided (its output is implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stationary AR(1) sample: s_1 ~ N(0, 1/(1-r^2)), s_{j+1} = r s_j + N(0,1).
inline std::vector<double> gen_ar_signal(std::size_t n, double r, Rng& rng) {
    if (!(std::abs(r) < 1.0)) throw std::invalid_argument("gen_ar_signal: need |r| < 1");
    std::vector<double> s(n);
    s[0] = rng.gaussian() / std::sqrt(1.0 - r * r);
    for (std::size_t j = 1; j < n; ++j) s[j] = r * s[j - 1] + rng.gaussian();
    return s;
}

/// 10 log10(||ref||^2 / ||ref - test||^2); +infinity when the error is
/// exactly zero.
inline double snr_db(const std::vector<double>& ref, const std::vector<double>& test) {
    if (ref.size() != test.size()) throw std::invalid_argument("snr_db: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        num += ref[i] * ref[i];
        const double e = ref[i] - test[i];
        den += e * e;
    }
    if (num == 0.0) throw std::invalid_argument("snr_db: zero reference");
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

} // namespace dctplus

#endif
