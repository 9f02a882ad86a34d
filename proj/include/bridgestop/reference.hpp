#pragma once

#include <cmath>
#include <stdexcept>

namespace bridgestop {

/// Brownian bridge with volatility sigma, pinned at (T, z).
struct BBSpec {
    double T = 1.0;
    double z = 0.0;
    double sigma = 1.0;

    void validate() const {
        if (!(sigma > 0.0) || !(T > 0.0)) throw std::invalid_argument("BBSpec: need sigma, T > 0");
    }
};

/// Shepp's constant for the Brownian-bridge stopping boundary, to the four
/// printed digits; comparisons against it never ask for more than 1e-4.
inline constexpr double kShepp = 0.8399;

/// Closed-form Brownian-bridge boundary z + K sigma sqrt(T - t).
inline double bb_boundary(const BBSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0 && t <= spec.T)) throw std::domain_error("bb_boundary: need 0 <= t <= T");
    return spec.z + kShepp * spec.sigma * std::sqrt(spec.T - t);
}

/// Bridge of the constant-coefficient OU process dX = a X dt + c dB,
/// conditioned from (0, x) to (T, z).
struct OUBSpec {
    double a = 1.0;
    double c = 1.0;
    double T = 1.0;
    double z = 0.0;
    double x = 0.0;

    void validate() const {
        if (!(c > 0.0) || !(T > 0.0)) throw std::invalid_argument("OUBSpec: need c, T > 0");
        if (a == 0.0) throw std::invalid_argument("OUBSpec: need a != 0 (a -> 0 is the BB limit)");
    }
};

/// Closed forms of the OU-bridge mean and covariance factorization:
///   m(t)  = (x sinh(a(T-t)) + z sinh(at)) / sinh(aT)
///   r1(t) = sinh(at) / sinh(aT)
///   r2(t) = c^2 sinh(a(T-t)) / a
///   gamma = r1 / r2
/// plus theta(t) = -r2'(t)/r2(t) = a coth(a(T-t)).
struct OubClosedForms {
    OUBSpec spec;

    double m(double t) const {
        return (spec.x * std::sinh(spec.a * (spec.T - t)) + spec.z * std::sinh(spec.a * t)) /
               std::sinh(spec.a * spec.T);
    }
    double r1(double t) const { return std::sinh(spec.a * t) / std::sinh(spec.a * spec.T); }
    double r2(double t) const {
        if (t >= spec.T) throw std::domain_error("OubClosedForms: r2 vanishes at T");
        return spec.c * spec.c * std::sinh(spec.a * (spec.T - t)) / spec.a;
    }
    double gamma(double t) const { return r1(t) / r2(t); }
    double theta(double t) const {
        if (t >= spec.T) throw std::domain_error("OubClosedForms: theta diverges at T");
        return spec.a / std::tanh(spec.a * (spec.T - t));
    }
    /// Marginal variance r1(t) r2(t), free of the factorization scale.
    double marginal_var(double t) const { return r1(t) * r2(t); }
};

inline OubClosedForms oub_closed_forms(const OUBSpec& spec) {
    spec.validate();
    return {spec};
}

}  // namespace bridgestop
