#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bridgestop/gmb.hpp"
#include "bridgestop/solver.hpp"

namespace bridgestop {

/// Coordinates of the infinite-horizon problem driven by a Brownian motion:
/// s is the transformed clock gamma_T(t) (diverging at the horizon), y the
/// transformed state.
struct BmCoords {
    double s = 0.0;
    double y = 0.0;
};

/// Time-space change to Brownian-motion coordinates,
///   s = gamma_T(t),
///   y = (x - alpha(t)) / beta_T(t) - gamma_T(t) (z - alpha(T)),
/// with alpha the parent mean, beta_T the bridge r2, gamma_T = r1/r2.
inline BmCoords to_bm_coords(const BridgeTables& tb, double t, double x) {
    if (!(t >= 0.0) || t > tb.horizon_guard())
        throw std::domain_error("to_bm_coords: need 0 <= t < T (s diverges at the horizon)");
    const double s = bridge_gamma(tb, t);
    const double beta = bridge_r2(tb, t);
    const double c0 = tb.z() - tb.parent_mean_T();
    return {s, (x - tb.parent_mean(t)) / beta - s * c0};
}

/// Gain function data of the transformed problem,
///   G(s, y) = a1(s) + a2(s) (c0 s + y),
/// with a1 = alpha o gamma^-1, a2 = beta_T o gamma^-1 (positive, decreasing),
/// c0 = z - alpha(T), c1 = alpha(T), c2 = 1. a1 and a2 are evaluated by
/// inverting the monotone clock over the tables; derivatives for the
/// boundary lower bound use central differences with a step tied to the
/// local mesh-image spacing.
class GainParams {
  public:
    GainParams(const BridgeTables& tb, const Mesh& mesh) : tb_(&tb) {
        c0_ = tb.z() - tb.parent_mean_T();
        c1_ = tb.parent_mean_T();
        const double guard = tb.horizon_guard();
        for (double t : mesh.nodes)
            if (t <= guard) s_grid_.push_back(bridge_gamma(tb, t));
    }

    double c0() const { return c0_; }
    double c1() const { return c1_; }
    double c2() const { return 1.0; }
    const std::vector<double>& s_grid() const { return s_grid_; }

    double a1(double s) const { return tb_->parent_mean(clock_inverse(s)); }
    double a2(double s) const { return bridge_r2(*tb_, clock_inverse(s)); }

    double a1_prime(double s) const { return central_diff([this](double u) { return a1(u); }, s); }
    double a2_prime(double s) const { return central_diff([this](double u) { return a2(u); }, s); }

    /// t = gamma_T^-1(s), by bisection on the increasing clock.
    double clock_inverse(double s) const {
        if (s <= 0.0) return 0.0;
        double lo = 0.0, hi = tb_->horizon_guard();
        if (bridge_gamma(*tb_, hi) <= s) return hi;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * tb_->T(); ++it) {
            const double mid = 0.5 * (lo + hi);
            (bridge_gamma(*tb_, mid) < s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// Central-difference step: half the local spacing of the mesh image.
    double fd_step(double s) const {
        if (s_grid_.size() < 2) return std::max(1e-6, 1e-4 * s);
        auto it = std::upper_bound(s_grid_.begin(), s_grid_.end(), s);
        std::size_t hi = static_cast<std::size_t>(it - s_grid_.begin());
        if (hi == 0) hi = 1;
        if (hi >= s_grid_.size()) hi = s_grid_.size() - 1;
        return 0.5 * (s_grid_[hi] - s_grid_[hi - 1]);
    }

  private:
    template <typename F>
    double central_diff(F&& f, double s) const {
        double h = fd_step(s);
        if (s - h < 0.0) h = 0.5 * s;
        return (f(s + h) - f(s - h)) / (2.0 * h);
    }

    const BridgeTables* tb_;
    double c0_ = 0.0, c1_ = 0.0;
    std::vector<double> s_grid_;
};

/// G(s, y) = a1(s) + a2(s) (c0 s + y).
inline double gain(const GainParams& gp, double s, double y) {
    if (!(s >= 0.0)) throw std::domain_error("gain: need s >= 0");
    return gp.a1(s) + gp.a2(s) * (gp.c0() * s + y);
}

/// Lower bound of the transformed stopping boundary,
///   g(s) = (-a1'(s) - c0 (a2(s) + a2'(s) s)) / a2'(s),
/// valid wherever a2'(s) < 0.
inline double osb_lower_bound(const GainParams& gp, double s) {
    const double a2p = gp.a2_prime(s);
    if (!(std::fabs(a2p) > 1e-12))
        throw DegeneracyError("osb_lower_bound: a2'(s) below machine floor");
    return (-gp.a1_prime(s) - gp.c0() * (gp.a2(s) + a2p * s)) / a2p;
}

/// Transformed image of an original-coordinate boundary point:
/// b_W(s) at s = gamma_T(t) is the y-coordinate of (t, b(t)).
inline BmCoords boundary_to_bm(const BridgeTables& tb, const Boundary& b, std::size_t node) {
    const double t = b.mesh.nodes[node];
    return to_bm_coords(tb, t, b.values[node]);
}

}  // namespace bridgestop
