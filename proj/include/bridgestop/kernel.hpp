#pragma once

#include <cmath>
#include <stdexcept>

#include "bridgestop/gmb.hpp"

namespace bridgestop {

/// Standard normal density.
inline double std_normal_pdf(double u) { return detail::std_phi(u); }

/// Standard normal survival function 1 - Phi(u), via erfc for full accuracy
/// in both tails.
inline double std_normal_survival(double u) {
    return 0.5 * std::erfc(u * 0.70710678118654752440);
}

/// Arguments of the Volterra kernel: 0 <= t1 <= t2 < T, x1, x2 real.
struct KernelInput {
    double t1 = 0.0;
    double x1 = 0.0;
    double t2 = 0.0;
    double x2 = 0.0;
};

/// K(t1, x1, t2, x2) = E_{t1,x1}[ mu(t2, X_{t2}) 1{X_{t2} >= x2} ] for the
/// affine bridge drift mu(t, x) = theta(t) (kappa(t) - x). With the Gaussian
/// law (E, V) of X_{t2} and xi = (x2 - E)/sqrt(V),
///   K = mu(t2, E) survival(xi) - theta(t2) sqrt(V) pdf(xi),
/// which is the drift decomposition theta(t2)((kappa(t2) - E) survival - sqrt(V) pdf).
/// Degenerate V = 0 (t2 == t1) keeps the right-continuous indicator 1{x1 >= x2}.
inline double eval_kernel(const BridgeTables& tb, const KernelInput& in) {
    if (!(in.t1 >= 0.0 && in.t1 <= in.t2) || in.t2 > tb.horizon_guard())
        throw std::domain_error("eval_kernel: need 0 <= t1 <= t2 < T");

    const GaussianLaw law = bridge_transition(tb, in.t1, in.x1, in.t2);
    const DriftCoeffs dc = drift_coeffs(tb, in.t2);
    if (law.var == 0.0)
        return (in.x1 >= in.x2) ? dc.mu(in.x1) : 0.0;

    const double sd = std::sqrt(law.var);
    const double xi = (in.x2 - law.mean) / sd;
    return dc.mu(law.mean) * std_normal_survival(xi) - dc.theta * sd * std_normal_pdf(xi);
}

inline double eval_kernel(const BridgeTables& tb, double t1, double x1, double t2, double x2) {
    return eval_kernel(tb, KernelInput{t1, x1, t2, x2});
}

}  // namespace bridgestop
