#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bridgestop/coefficients.hpp"
#include "bridgestop/errors.hpp"

namespace bridgestop {

/// The unconditioned ("parent") Gauss-Markov process
///   dX~_t = theta~(t) (kappa~(t) - X~_t) dt + nu~(t) dB_t,  X~_0 = x0,
/// on the horizon [0, T].
struct ParentSpec {
    CoefficientFn theta;  // mean-reversion rate, 1/time
    CoefficientFn kappa;  // mean-reverting level, space units
    CoefficientFn nu;     // volatility > 0, space/sqrt(time)
    double T = 1.0;
    double x0 = 0.0;

    void validate() const {
        if (!(T > 0.0)) throw std::invalid_argument("ParentSpec: T must be positive");
        if (!std::isfinite(x0)) throw std::invalid_argument("ParentSpec: x0 must be finite");
    }
};

/// The parent conditioned to hit the pin (T, z).
struct BridgeSpec {
    ParentSpec parent;
    double z = 0.0;  // pinning point

    void validate() const {
        parent.validate();
        if (!std::isfinite(z)) throw std::invalid_argument("BridgeSpec: z must be finite");
    }
};

struct GaussianLaw {
    double mean = 0.0;
    double var = 0.0;
};

/// Affine-in-x decomposition of the bridge drift at a fixed time:
/// mu(t, x) = mu0 - theta * x, with theta > 0.
struct DriftCoeffs {
    double theta = 0.0;
    double mu0 = 0.0;
    double mu(double x) const { return mu0 - theta * x; }
};

/// Precomputed quadrature tables for the parent process:
///   phi~(t)  = exp(-int_0^t theta~)
///   m~(t)    = phi~(t) (x0 + int_0^t kappa~ theta~ / phi~)
///   h~(t)    = int_0^t nu~^2 / phi~^2
/// so that the parent factorizes as r~1 = phi~ h~, r~2 = phi~ and admits the
/// representation X~_t = m~(t) + phi~(t) B_{h~(t)}. Every transition law of
/// the bridge is an O(1) conditioning of that representation, which stays
/// numerically benign arbitrarily close to the horizon.
///
/// Immutable after build_tables(); all queries are pure and thread-safe.
class BridgeTables {
  public:
    BridgeTables() = default;

    const BridgeSpec& spec() const { return spec_; }
    double T() const { return spec_.parent.T; }
    double z() const { return spec_.z; }
    std::size_t Q() const { return q_; }

    /// Operations that need t < T reject queries beyond this point.
    double horizon_guard() const { return T() * (1.0 - 1e-12); }

    double parent_phi(double t) const { return lerp(phi_, t); }
    double parent_mean(double t) const { return lerp(mean_, t); }
    double parent_h(double t) const { return lerp(h_, t); }

    double parent_phi_T() const { return phi_.back(); }
    double parent_mean_T() const { return mean_.back(); }
    double parent_h_T() const { return h_.back(); }

    double theta_parent(double t) const { return spec_.parent.theta.value(t); }
    double kappa_parent(double t) const { return spec_.parent.kappa.value(t); }
    double nu(double t) const { return spec_.parent.nu.value(t); }

    friend BridgeTables build_tables(const BridgeSpec& spec, std::size_t Q);

  private:
    double lerp(const std::vector<double>& v, double t) const {
        if (t <= 0.0) return v.front();
        if (t >= T()) return v.back();
        auto k = static_cast<std::size_t>(t * inv_dt_);
        if (k >= q_) k = q_ - 1;
        const double t0 = dt_ * static_cast<double>(k);
        const double w = (t - t0) * inv_dt_;
        return v[k] + w * (v[k + 1] - v[k]);
    }

    BridgeSpec spec_;
    std::size_t q_ = 0;
    double dt_ = 0.0, inv_dt_ = 0.0;
    std::vector<double> phi_, mean_, h_;
};

/// Build the parent tables on a uniform grid with Q intervals.
inline BridgeTables build_tables(const BridgeSpec& spec, std::size_t Q) {
    spec.validate();
    if (Q < 2) throw std::invalid_argument("build_tables: Q must be >= 2");

    BridgeTables tb;
    tb.spec_ = spec;
    tb.q_ = Q;
    const double T = spec.parent.T;
    tb.dt_ = T / static_cast<double>(Q);
    tb.inv_dt_ = static_cast<double>(Q) / T;

    const CumulativeTable itheta = cumulative(spec.parent.theta, Q, T);

    tb.phi_.resize(Q + 1);
    for (std::size_t k = 0; k <= Q; ++k) {
        tb.phi_[k] = std::exp(-itheta.values[k]);
        if (!std::isfinite(tb.phi_[k]) || tb.phi_[k] <= 0.0)
            throw NumericError("build_tables: exp(-int theta~) overflowed at node " + std::to_string(k));
    }

    // m~ and h~ share the grid; their integrands need phi~ at the same nodes.
    std::vector<double> g_mean(Q + 1), g_h(Q + 1);
    for (std::size_t k = 0; k <= Q; ++k) {
        const double tk = (k == Q) ? T : tb.dt_ * static_cast<double>(k);
        const double th = spec.parent.theta.value(tk);
        const double ka = spec.parent.kappa.value(tk);
        const double nu = spec.parent.nu.value(tk);
        if (!std::isfinite(th) || !std::isfinite(ka))
            throw std::invalid_argument("build_tables: non-finite theta~/kappa~ at node " + std::to_string(k));
        if (!(nu > 0.0) || !std::isfinite(nu))
            throw std::invalid_argument("build_tables: nu~ must be positive, violated at node " +
                                        std::to_string(k) + " (t = " + std::to_string(tk) + ")");
        g_mean[k] = ka * th / tb.phi_[k];
        g_h[k] = nu * nu / (tb.phi_[k] * tb.phi_[k]);
        if (!std::isfinite(g_mean[k]) || !std::isfinite(g_h[k]))
            throw NumericError("build_tables: non-finite integrand at node " + std::to_string(k));
    }

    tb.mean_.resize(Q + 1);
    tb.h_.resize(Q + 1);
    double acc_m = 0.0, acc_h = 0.0;
    tb.mean_[0] = spec.parent.x0;
    tb.h_[0] = 0.0;
    for (std::size_t k = 1; k <= Q; ++k) {
        acc_m += 0.5 * (g_mean[k - 1] + g_mean[k]) * tb.dt_;
        acc_h += 0.5 * (g_h[k - 1] + g_h[k]) * tb.dt_;
        tb.mean_[k] = tb.phi_[k] * (spec.parent.x0 + acc_m);
        tb.h_[k] = acc_h;
        if (!(tb.h_[k] > tb.h_[k - 1]))
            throw DegeneracyError("build_tables: h~ not strictly increasing at node " + std::to_string(k));
    }
    return tb;
}

/// Conditional law of X_{t2} given X_{t1} = x1 for the bridge pinned at
/// (T, z): Brownian-bridge conditioning of the parent representation at the
/// clock times h~(t1) <= h~(t2) <= h~(T).
inline GaussianLaw bridge_transition(const BridgeTables& tb, double t1, double x1, double t2) {
    const double T = tb.T();
    if (!(t1 >= 0.0 && t1 <= t2 && t2 <= T))
        throw std::domain_error("bridge_transition: need 0 <= t1 <= t2 <= T");
    if (t2 >= T) return {tb.z(), 0.0};

    const double h1 = tb.parent_h(t1), h2 = tb.parent_h(t2), hT = tb.parent_h_T();
    const double denom = hT - h1;
    if (!(denom > 0.0))
        throw DegeneracyError("bridge_transition: parent degenerate past t1");

    const double phi1 = tb.parent_phi(t1), phi2 = tb.parent_phi(t2), phiT = tb.parent_phi_T();
    const double m1 = tb.parent_mean(t1), m2 = tb.parent_mean(t2), mT = tb.parent_mean_T();

    const double w = (h2 - h1) / denom;
    const double mean = m2 + phi2 * ((1.0 - w) * (x1 - m1) / phi1 + w * (tb.z() - mT) / phiT);
    double var = phi2 * phi2 * (h2 - h1) * (hT - h2) / denom;
    if (var < 0.0) var = 0.0;
    return {mean, var};
}

/// Both bridge SDE coefficients at once: the drift of the pinned process is
/// mu(t, x) = mu~(t, x) + nu~^2(t) d/dx log p~(t, x; T, z), which for the
/// Gaussian parent transition p~ collapses to an affine function of x.
inline DriftCoeffs drift_coeffs(const BridgeTables& tb, double t) {
    if (!(t >= 0.0) || t > tb.horizon_guard())
        throw std::domain_error("drift_coeffs: need 0 <= t < T (drift diverges at the horizon)");
    const double hT = tb.parent_h_T(), ht = tb.parent_h(t);
    const double phit = tb.parent_phi(t), phiT = tb.parent_phi_T();
    const double nut = tb.nu(t);
    const double span = hT - ht;
    if (!(span > 0.0)) throw DegeneracyError("drift_coeffs: parent degenerate before T");

    const double pull = nut * nut / (phit * phiT * span);  // nu~^2 (phi~T/phi~t) / Var~[X_T | X_t]
    const double ratio = phiT / phit;
    const double th_parent = tb.theta_parent(t);

    DriftCoeffs out;
    out.theta = th_parent + pull * ratio;
    out.mu0 = th_parent * tb.kappa_parent(t) + pull * (tb.z() - tb.parent_mean_T() + ratio * tb.parent_mean(t));
    return out;
}

/// mu(t, x) = theta(t) (kappa(t) - x) of the bridge SDE.
inline double bridge_drift(const BridgeTables& tb, double t, double x) {
    return drift_coeffs(tb, t).mu(x);
}

/// theta(t) of the bridge, i.e. minus the x-slope of the drift.
inline double theta_of(const BridgeTables& tb, double t) { return drift_coeffs(tb, t).theta; }

/// Bridge covariance factorization Cov(X_t1, X_t2) = r1(t1 ^ t2) r2(t1 v t2),
/// normalized so that r1(T) = 1 (then r2(0) = phi~(T) h~(T) > 0). The ratio
/// gamma = r1/r2 is the clock of the Brownian-motion representation and does
/// not depend on the normalization.
inline double bridge_r1(const BridgeTables& tb, double t) {
    return tb.parent_phi(t) * tb.parent_h(t) / (tb.parent_phi_T() * tb.parent_h_T());
}

inline double bridge_r2(const BridgeTables& tb, double t) {
    return tb.parent_phi_T() * tb.parent_phi(t) * (tb.parent_h_T() - tb.parent_h(t));
}

inline double bridge_gamma(const BridgeTables& tb, double t) {
    if (!(t >= 0.0) || t > tb.horizon_guard())
        throw std::domain_error("bridge_gamma: need 0 <= t < T (clock diverges at the horizon)");
    const double hT = tb.parent_h_T(), ht = tb.parent_h(t);
    const double phiT = tb.parent_phi_T();
    return ht / (phiT * phiT * hT * (hT - ht));
}

/// Explicit covariance factorization at a reference point t_ref:
///   r1(t) = R(t, t')                      for t <= t',
///           R(t, t) R(t', t') / R(t', t)  for t >  t',
///   r2(t) = R(t, t) / R(t, t')            for t <= t',
///           R(t', t) / R(t', t')          for t >  t'.
/// Grid nodes must lie strictly inside the interval where R is nonzero.
/// Rejects covariances whose ratio r1/r2 is not positive and strictly
/// increasing, which is exactly the Markov criterion.
inline std::pair<std::vector<double>, std::vector<double>> factorize_covariance(
    const std::function<double(double, double)>& R, double t_ref, const std::vector<double>& grid) {
    const double Rrr = R(t_ref, t_ref);
    if (!(Rrr > 0.0))
        throw DegeneracyError("factorize_covariance: R(t_ref, t_ref) <= 0");
    std::vector<double> r1(grid.size()), r2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t <= t_ref) {
            const double Rtr = R(t, t_ref);
            if (Rtr == 0.0) throw DegeneracyError("factorize_covariance: R vanishes at a grid node");
            r1[i] = Rtr;
            r2[i] = R(t, t) / Rtr;
        } else {
            const double Rrt = R(t_ref, t);
            if (Rrt == 0.0) throw DegeneracyError("factorize_covariance: R vanishes at a grid node");
            r1[i] = R(t, t) * Rrr / Rrt;
            r2[i] = Rrt / Rrr;
        }
        if (!std::isfinite(r1[i]) || !std::isfinite(r2[i]))
            throw NumericError("factorize_covariance: non-finite factor at node " + std::to_string(i));
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (r2[i] == 0.0) throw DegeneracyError("factorize_covariance: r2 vanishes at a grid node");
        const double ratio = r1[i] / r2[i];
        if (!(ratio > 0.0) || !(ratio > prev))
            throw NotMarkovError("factorize_covariance: r1/r2 not positive and strictly increasing at node " +
                                 std::to_string(i));
        prev = ratio;
    }
    return {std::move(r1), std::move(r2)};
}

}  // namespace bridgestop
