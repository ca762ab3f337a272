#ifndef DCTPLUS_FAST_TRANSFORM_HPP
#define DCTPLUS_FAST_TRANSFORM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dctplus/cauchy.hpp"
#include "dctplus/graph.hpp"
#include "dctplus/matrix.hpp"
#include "dctplus/nfst.hpp"
#include "dctplus/spectral.hpp"
#include "dctplus/trig.hpp"

namespace dctplus {

/// Path-graph smoothness functional sum w (s_i - s_j)^2, i.e. the quadratic
/// Laplacian form of the unit path computed edge by edge in O(n).
inline double path_quadratic_form(const std::vector<double>& s) {
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double d = s[i] - s[i + 1];
        q += d * d;
    }
    return q;
}

/// Caller-owned scratch for forward/inverse execution. One workspace per
/// thread; plans themselves stay immutable.
struct DctPlusWorkspace {
    std::vector<double> s_d, sv, h, c, phi, out, d, b, g, work;
    NfstScratch nfst;
};

/// Precomputed state for the fast transform of one rank-one update of the
/// path graph. Holds both the O(n log n) pipeline data and the dense basis
/// (the NMVP baseline and accuracy oracle).
class DctPlusPlan {
  public:
    DctPlusPlan(std::size_t n, const RankOneUpdate& update, double epsilon, double tau = 1e-12)
        : n_(checked_size(n)),
          update_(update),
          epsilon_(epsilon),
          dct_(TrigKind::dct2, n),
          idct_(TrigKind::idct2, n),
          dst_(TrigKind::dst1, n - 1) {
        if (!(epsilon > 0.0) || !(epsilon < 1.0))
            throw std::invalid_argument("DctPlusPlan: epsilon must lie in (0, 1)");

        const double pi = std::numbers::pi;
        lambda_.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            lambda_[k] = 2.0 - 2.0 * std::cos(static_cast<double>(k) * pi / static_cast<double>(n));
        lambda_[0] = 0.0;

        const std::vector<double> v = update.direction(n);
        std::vector<double> z(n), dwork(n);
        dct_.execute(v.data(), z.data());

        fact_.lambda = lambda_;
        fact_.spec = perturb_spectrum(lambda_, z, update.rho, tau);
        if (!fact_.spec.deflation.rotations.empty())
            throw std::logic_error("DctPlusPlan: path eigenvalues cannot repeat");

        // Materialize the dense basis once: it fixes the column signs and is
        // the plan's NMVP/oracle matrix.
        Matrix xu = detail::assemble_unsigned_basis(
            lambda_, fact_.spec, [&](const std::vector<double>& y) {
                std::vector<double> col(n);
                idct_.execute(y.data(), col.data(), dwork.data());
                return col;
            });
        fact_.sigma.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            fact_.sigma[s] = column_sign_convention(xu, s);
            if (fact_.sigma[s] < 0.0)
                for (std::size_t i = 0; i < n; ++i) xu(i, s) = -xu(i, s);
        }
        x_ = std::move(xu);

        // Near-pole guard: Cauchy denominators below this trip the dense
        // fallback for correctness.
        const double guard = 1e-10 * lambda_[n - 1];
        for (double nu : fact_.spec.sub_mu)
            for (double l : lambda_)
                if (std::abs(nu - l) < guard) slow_path_ = true;
        if (slow_path_) return;

        const auto& spec = fact_.spec;
        const std::size_t na = spec.sub_mu.size();
        const std::size_t ext_rank = (na == 0) ? 0 : (update.rho > 0.0 ? na - 1 : 0);

        for (std::size_t slot = 0; slot < spec.slots.size(); ++slot) {
            const SlotRef ref = spec.slots[slot];
            if (ref.passthrough) {
                pass_.push_back({slot, ref.idx, fact_.sigma[slot]});
                continue;
            }
            const double nu = spec.sub_mu[ref.idx];
            const double scale = -fact_.sigma[slot] * spec.a[slot];
            if (na > 0 && ref.idx == ext_rank) {
                has_exterior_ = true;
                exterior_slot_ = slot;
                exterior_scale_ = scale;
                ext_row_.resize(n);
                for (std::size_t j = 0; j < n; ++j) ext_row_[j] = 1.0 / (nu - lambda_[j]);
            } else {
                const double mu_t = 1.0 - nu / 2.0;
                if (!(mu_t > -1.0 && mu_t < 1.0)) {
                    slow_path_ = true;
                    return;
                }
                const double th = std::acos(mu_t);
                interior_slots_.push_back(slot);
                theta_.push_back(th);
                inv_sin_ntheta_.push_back(1.0 / std::sin(static_cast<double>(n) * th));
                inv_nu_.push_back(1.0 / nu);
                interior_scale_.push_back(scale);
            }
        }

        h_weights_.resize(n - 1);
        for (std::size_t j = 1; j < n; ++j) {
            const double sj = std::sin(static_cast<double>(j) * pi / static_cast<double>(n));
            h_weights_[j - 1] = ((j % 2 == 1) ? 1.0 : -1.0) / sj;
        }

        if (!theta_.empty()) nfst_.emplace(theta_, n - 1, epsilon);
    }

    std::size_t size() const { return n_; }
    double epsilon() const { return epsilon_; }
    const RankOneUpdate& update() const { return update_; }
    const std::vector<double>& lambda() const { return lambda_; }
    const std::vector<double>& mu() const { return fact_.spec.mu; }
    const CauchyFactorization& factorization() const { return fact_; }
    const Matrix& basis() const { return x_; }
    bool slow_path() const { return slow_path_; }

    DctPlusWorkspace make_workspace() const {
        DctPlusWorkspace ws;
        ws.s_d.resize(n_);
        ws.sv.resize(n_);
        ws.h.resize(n_ - 1);
        ws.c.resize(n_ - 1);
        ws.phi.resize(theta_.size());
        ws.out.resize(n_);
        ws.d.resize(n_);
        ws.b.resize(n_ - 1);
        ws.g.resize(n_ - 1);
        ws.work.resize(n_);
        return ws;
    }

    /// Fast forward transform (coefficients of the perturbed GFT, ascending
    /// eigenvalue order). Falls back to the dense product when the plan was
    /// flagged slow-path.
    const std::vector<double>& forward(const std::vector<double>& s, DctPlusWorkspace& ws) const {
        check_signal(s);
        if (slow_path_) return forward_nmvp(s, ws);

        dct_.execute(s.data(), ws.s_d.data());
        const auto& z = fact_.spec.z;
        for (std::size_t j = 0; j < n_; ++j) ws.sv[j] = z[j] * ws.s_d[j];

        for (const Pass& p : pass_) ws.out[p.slot] = p.sign * ws.s_d[p.src];

        if (has_exterior_) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) acc += ext_row_[j] * ws.sv[j];
            ws.out[exterior_slot_] = exterior_scale_ * acc;
        }

        if (!interior_slots_.empty()) {
            for (std::size_t j = 1; j < n_; ++j) ws.h[j - 1] = h_weights_[j - 1] * ws.sv[j];
            dst_.execute(ws.h.data(), ws.c.data());
            nfst_->exec_into(ws.c, ws.phi, ws.nfst);
            const double s1 = ws.sv[0];
            for (std::size_t r = 0; r < interior_slots_.size(); ++r) {
                const double q = -0.5 * ws.phi[r] * inv_sin_ntheta_[r];
                ws.out[interior_slots_[r]] = interior_scale_[r] * (q + s1 * inv_nu_[r]);
            }
        }
        return ws.out;
    }

    std::vector<double> forward(const std::vector<double>& s) const {
        DctPlusWorkspace ws = make_workspace();
        return forward(s, ws);
    }

    /// Dense X^T s through the materialized basis: the O(n^2) baseline and
    /// the accuracy oracle for the fast path.
    const std::vector<double>& forward_nmvp(const std::vector<double>& s,
                                            DctPlusWorkspace& ws) const {
        if (s.size() != n_) throw std::invalid_argument("forward_nmvp: size mismatch");
        std::fill(ws.out.begin(), ws.out.end(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double si = s[i];
            const double* row = x_.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) ws.out[j] += row[j] * si;
        }
        return ws.out;
    }

    std::vector<double> forward_nmvp(const std::vector<double>& s) const {
        DctPlusWorkspace ws = make_workspace();
        return forward_nmvp(s, ws);
    }

    /// Step-wise inverse of the forward pipeline (X p). `fast` selects the
    /// adjoint-NFST route; otherwise the dense product is used.
    const std::vector<double>& inverse(const std::vector<double>& p, DctPlusWorkspace& ws,
                                       bool fast = true) const {
        check_signal(p);
        if (slow_path_ || !fast) {
            std::fill(ws.out.begin(), ws.out.end(), 0.0);
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                const double* row = x_.data() + i * n_;
                for (std::size_t j = 0; j < n_; ++j) acc += row[j] * p[j];
                ws.out[i] = acc;
            }
            return ws.out;
        }

        std::fill(ws.d.begin(), ws.d.end(), 0.0);
        if (has_exterior_) {
            const double y_ext = -exterior_scale_ * p[exterior_slot_];
            for (std::size_t j = 0; j < n_; ++j) ws.d[j] -= y_ext * ext_row_[j];
        }
        if (!interior_slots_.empty()) {
            double d0 = 0.0;
            for (std::size_t r = 0; r < interior_slots_.size(); ++r) {
                const double y = -interior_scale_[r] * p[interior_slots_[r]];
                d0 -= y * inv_nu_[r];
                ws.phi[r] = -0.5 * y * inv_sin_ntheta_[r];
            }
            ws.d[0] += d0;
            nfst_->adjoint_into(ws.phi, ws.b, ws.nfst);
            dst_.execute(ws.b.data(), ws.g.data());
            for (std::size_t j = 1; j < n_; ++j) ws.d[j] -= h_weights_[j - 1] * ws.g[j - 1];
        }
        const auto& z = fact_.spec.z;
        for (std::size_t j = 0; j < n_; ++j) ws.d[j] *= z[j];
        for (const Pass& pp : pass_) ws.d[pp.src] += pp.sign * p[pp.slot];

        idct_.execute(ws.d.data(), ws.out.data(), ws.work.data());
        return ws.out;
    }

    std::vector<double> inverse(const std::vector<double>& p, bool fast = true) const {
        DctPlusWorkspace ws = make_workspace();
        return inverse(p, ws, fast);
    }

    const TrigPlan& dct_plan() const { return dct_; }

  private:
    // Runs ahead of every other member initializer (n_ is declared first).
    static std::size_t checked_size(std::size_t n) {
        if (n < 2) throw std::invalid_argument("DctPlusPlan: need n >= 2");
        return n;
    }

    void check_signal(const std::vector<double>& s) const {
        if (s.size() != n_) throw std::invalid_argument("DctPlusPlan: signal size mismatch");
        for (double v : s)
            if (!std::isfinite(v))
                throw std::domain_error("DctPlusPlan: non-finite input sample");
    }

    struct Pass {
        std::size_t slot, src;
        double sign;
    };

    std::size_t n_;
    RankOneUpdate update_;
    double epsilon_;
    std::vector<double> lambda_;
    CauchyFactorization fact_;
    Matrix x_;
    bool slow_path_ = false;

    bool has_exterior_ = false;
    std::size_t exterior_slot_ = 0;
    double exterior_scale_ = 0.0;
    std::vector<double> ext_row_;
    std::vector<std::size_t> interior_slots_;
    std::vector<double> theta_, inv_sin_ntheta_, inv_nu_, interior_scale_;
    std::vector<double> h_weights_;
    std::vector<Pass> pass_;

    TrigPlan dct_, idct_, dst_;
    std::optional<NfstPlan> nfst_;
};

inline DctPlusPlan plan_dctplus(std::size_t n, const RankOneUpdate& u, double epsilon,
                                double tau = 1e-12) {
    return DctPlusPlan(n, u, epsilon, tau);
}

inline std::vector<double> forward(const DctPlusPlan& plan, const std::vector<double>& s) {
    return plan.forward(s);
}

inline std::vector<double> forward_nmvp(const DctPlusPlan& plan, const std::vector<double>& s) {
    return plan.forward_nmvp(s);
}

inline std::vector<double> inverse(const DctPlusPlan& plan, const std::vector<double>& p) {
    return plan.inverse(p);
}

// --- pruned multi-transform ensemble ------------------------------------------

/// Scratch for PrunedEnsemblePlan::forward_all: one workspace per member
/// plus the shared-DCT buffer.
struct PrunedWorkspace {
    std::vector<DctPlusWorkspace> members;
    std::vector<double> sd;
};

/// Ensemble of k transforms sharing one DCT stage: member 0 is the DCT
/// itself, members 1..k-1 are rank-one updates applied through truncated
/// c_p x c_p Cauchy blocks when the input is smooth enough (path quadratic
/// form below the threshold). In the pruned branch every member keeps c_p
/// components, the DCT included; the lower-left blocks evaluate the
/// truncation error bound. Above the threshold each member runs in full,
/// through the dense product at small sizes (where it is the faster
/// implementation) and the fast pipeline otherwise.
class PrunedEnsemblePlan {
  public:
    // Sizes up to this run full-branch members through the dense product;
    // the fast pipeline overtakes it above (typical crossover 64-256).
    static constexpr std::size_t kDenseMemberCutoff = 128;
    PrunedEnsemblePlan(std::size_t n, const std::vector<RankOneUpdate>& updates, std::size_t cp,
                       double threshold, double epsilon = 1e-12)
        : n_(n), cp_(cp), threshold_(threshold), dct_(TrigKind::dct2, n) {
        if (cp < 1 || cp > n)
            throw std::invalid_argument("PrunedEnsemblePlan: need 1 <= c_p <= n");
        for (const auto& u : updates) {
            members_.emplace_back(n, u, epsilon);
            const DctPlusPlan& plan = members_.back();
            const auto& spec = plan.factorization().spec;
            const auto& sigma = plan.factorization().sigma;
            // Post-DCT matrix rows: active slots are scaled Cauchy rows, pass
            // slots are signed unit rows.
            Matrix t(n, n);
            for (std::size_t slot = 0; slot < n; ++slot) {
                const SlotRef ref = spec.slots[slot];
                if (ref.passthrough) {
                    t(slot, ref.idx) = sigma[slot];
                    continue;
                }
                const double nu = spec.sub_mu[ref.idx];
                const double sc = -sigma[slot] * spec.a[slot];
                for (std::size_t j = 0; j < n; ++j)
                    if (spec.z[j] != 0.0) t(slot, j) = sc * spec.z[j] / (nu - plan.lambda()[j]);
            }
            Matrix ul(cp, cp), hl(n - cp, cp);
            for (std::size_t i = 0; i < cp; ++i)
                for (std::size_t j = 0; j < cp; ++j) ul(i, j) = t(i, j);
            for (std::size_t i = cp; i < n; ++i)
                for (std::size_t j = 0; j < cp; ++j) hl(i - cp, j) = t(i, j);
            block_ul_.push_back(std::move(ul));
            block_hl_.push_back(std::move(hl));
        }
    }

    std::size_t size() const { return n_; }
    std::size_t keep_count() const { return cp_; }
    double threshold() const { return threshold_; }
    std::size_t ensemble_size() const { return members_.size() + 1; }
    const DctPlusPlan& member(std::size_t r) const { return members_.at(r - 1); }

    struct Result {
        bool pruned = false;
        std::vector<std::vector<double>> coeffs; // one vector per ensemble member
        std::vector<double> bounds;              // truncation-error bound per member
    };

    PrunedWorkspace make_workspace() const {
        PrunedWorkspace ws;
        for (const auto& m : members_) ws.members.push_back(m.make_workspace());
        ws.sd.resize(n_);
        return ws;
    }

    void forward_all(const std::vector<double>& s, PrunedWorkspace& ws, Result& res) const {
        if (s.size() != n_) throw std::invalid_argument("pruned_forward_all: size mismatch");
        res.coeffs.resize(ensemble_size());
        res.bounds.assign(ensemble_size(), 0.0);

        dct_.execute(s.data(), ws.sd.data());
        const std::vector<double>& sd = ws.sd;
        res.coeffs[0] = sd;

        if (path_quadratic_form(s) <= threshold_) {
            res.pruned = true;
            double tail2 = 0.0;
            for (std::size_t j = cp_; j < n_; ++j) tail2 += sd[j] * sd[j];
            const double tail = std::sqrt(tail2);
            // The shared DCT branch is pruned to c_p components as well; its
            // truncation error is exactly the dropped tail.
            for (std::size_t j = cp_; j < n_; ++j) res.coeffs[0][j] = 0.0;
            res.bounds[0] = tail;
            for (std::size_t r = 0; r < members_.size(); ++r) {
                std::vector<double>& y = res.coeffs[r + 1];
                y.assign(n_, 0.0);
                const Matrix& ul = block_ul_[r];
                for (std::size_t i = 0; i < cp_; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < cp_; ++j) acc += ul(i, j) * sd[j];
                    y[i] = acc;
                }
                double leak2 = 0.0;
                const Matrix& hl = block_hl_[r];
                for (std::size_t i = 0; i + cp_ < n_; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < cp_; ++j) acc += hl(i, j) * sd[j];
                    leak2 += acc * acc;
                }
                res.bounds[r + 1] = tail + std::sqrt(leak2);
            }
        } else {
            res.pruned = false;
            for (std::size_t r = 0; r < members_.size(); ++r)
                res.coeffs[r + 1] = (n_ <= kDenseMemberCutoff)
                                        ? members_[r].forward_nmvp(s, ws.members[r])
                                        : members_[r].forward(s, ws.members[r]);
        }
    }

    Result forward_all(const std::vector<double>& s) const {
        PrunedWorkspace ws = make_workspace();
        Result res;
        forward_all(s, ws, res);
        return res;
    }

  private:
    std::size_t n_, cp_;
    double threshold_;
    std::vector<DctPlusPlan> members_;
    std::vector<Matrix> block_ul_, block_hl_;
    TrigPlan dct_;
};

inline PrunedEnsemblePlan plan_pruned(std::size_t n, const std::vector<RankOneUpdate>& updates,
                                      std::size_t cp, double threshold, double epsilon = 1e-12) {
    return PrunedEnsemblePlan(n, updates, cp, threshold, epsilon);
}

inline PrunedEnsemblePlan::Result pruned_forward_all(const PrunedEnsemblePlan& plan,
                                                     const std::vector<double>& s) {
    return plan.forward_all(s);
}

struct RdoChoice {
    std::size_t index = 0;
    std::vector<double> coeffs;
    bool pruned = false;
};

/// Pick the ensemble member whose coefficients minimize the cost (default:
/// l1 norm as the rate-distortion proxy), on pruned or full outputs per the
/// threshold branch. Ties go to the lower index. In the pruned branch every
/// member is on the same c_p-component footing by construction.
template <class Cost>
RdoChoice rdo_select(const PrunedEnsemblePlan& plan, const std::vector<double>& s, Cost cost) {
    PrunedEnsemblePlan::Result res = plan.forward_all(s);
    RdoChoice choice;
    choice.pruned = res.pruned;
    double best = cost(res.coeffs[0]);
    choice.index = 0;
    for (std::size_t r = 1; r < res.coeffs.size(); ++r) {
        const double c = cost(res.coeffs[r]);
        if (c < best) {
            best = c;
            choice.index = r;
        }
    }
    choice.coeffs = std::move(res.coeffs[choice.index]);
    return choice;
}

inline RdoChoice rdo_select(const PrunedEnsemblePlan& plan, const std::vector<double>& s) {
    return rdo_select(plan, s, [](const std::vector<double>& c) { return norm1(c); });
}

} // namespace dctplus

#endif
