#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bridgestop/errors.hpp"

namespace bridgestop {

/// Parametric families for the time-dependent coefficients of a Gauss-Markov
/// process (mean-reversion rate, mean-reverting level, volatility).
enum class CoefficientFamily {
    constant,                // params: {c}
    linear,                  // params: {intercept, slope}
    sinusoid,                // params: {base, amplitude, omega, phase}
    normal_cdf_ramp,         // params: {offset, scale, slope, center}
    normal_pdf_bump,         // params: {offset, scale, slope, center}
    piecewise_linear_table,  // params: {t0, v0, t1, v1, ...}, t strictly increasing
};

namespace detail {

inline double std_phi(double u) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

inline double std_cdf(double u) { return 0.5 * std::erfc(-u * 0.70710678118654752440); }

}  // namespace detail

/// A scalar function of time evaluable on [0, T]. Immutable once built.
struct CoefficientFn {
    CoefficientFamily family = CoefficientFamily::constant;
    std::vector<double> params;

    static CoefficientFn constant(double c) { return {CoefficientFamily::constant, {c}}; }
    static CoefficientFn linear(double intercept, double slope) {
        return {CoefficientFamily::linear, {intercept, slope}};
    }
    static CoefficientFn sinusoid(double base, double amplitude, double omega, double phase = 0.0) {
        return {CoefficientFamily::sinusoid, {base, amplitude, omega, phase}};
    }
    static CoefficientFn normal_cdf_ramp(double offset, double scale, double slope, double center) {
        return {CoefficientFamily::normal_cdf_ramp, {offset, scale, slope, center}};
    }
    static CoefficientFn normal_pdf_bump(double offset, double scale, double slope, double center) {
        return {CoefficientFamily::normal_pdf_bump, {offset, scale, slope, center}};
    }
    /// Knots as flattened (t, v) pairs; queries outside the knot range clamp
    /// to the nearest knot value.
    static CoefficientFn table(std::vector<double> knots) {
        return {CoefficientFamily::piecewise_linear_table, std::move(knots)};
    }

    std::size_t expected_params() const {
        switch (family) {
            case CoefficientFamily::constant: return 1;
            case CoefficientFamily::linear: return 2;
            case CoefficientFamily::sinusoid: return 4;
            case CoefficientFamily::normal_cdf_ramp: return 4;
            case CoefficientFamily::normal_pdf_bump: return 4;
            case CoefficientFamily::piecewise_linear_table: return params.size();
        }
        return 0;
    }

    /// Closed-form value at t. Callers are responsible for keeping t inside
    /// the horizon; see eval() for the checked entry point.
    double value(double t) const {
        check_params();
        const auto& p = params;
        switch (family) {
            case CoefficientFamily::constant:
                return p[0];
            case CoefficientFamily::linear:
                return p[0] + p[1] * t;
            case CoefficientFamily::sinusoid:
                return p[0] + p[1] * std::sin(p[2] * t + p[3]);
            case CoefficientFamily::normal_cdf_ramp:
                return p[0] + p[1] * detail::std_cdf(p[2] * (t - p[3]));
            case CoefficientFamily::normal_pdf_bump:
                return p[0] + p[1] * detail::std_phi(p[2] * (t - p[3]));
            case CoefficientFamily::piecewise_linear_table:
                return table_value(t);
        }
        throw std::invalid_argument("CoefficientFn: unknown family");
    }

  private:
    void check_params() const {
        if (family == CoefficientFamily::piecewise_linear_table) {
            if (params.size() < 2 || params.size() % 2 != 0)
                throw std::invalid_argument("CoefficientFn: table needs (t, v) pairs");
            for (std::size_t k = 2; k < params.size(); k += 2)
                if (!(params[k] > params[k - 2]))
                    throw std::invalid_argument("CoefficientFn: table knots must be strictly increasing");
            return;
        }
        if (params.size() != expected_params())
            throw std::invalid_argument("CoefficientFn: wrong parameter count for family");
    }

    double table_value(double t) const {
        const std::size_t n = params.size() / 2;
        if (t <= params[0]) return params[1];
        if (t >= params[2 * (n - 1)]) return params[2 * (n - 1) + 1];
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (params[2 * mid] <= t ? lo : hi) = mid;
        }
        const double t0 = params[2 * lo], v0 = params[2 * lo + 1];
        const double t1 = params[2 * hi], v1 = params[2 * hi + 1];
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
};

/// Checked evaluation on [0, T].
inline double eval(const CoefficientFn& fn, double t, double T) {
    if (!(t >= 0.0 && t <= T))
        throw std::domain_error("eval: t outside [0, T]");
    const double v = fn.value(t);
    if (!std::isfinite(v))
        throw NumericError("eval: non-finite coefficient value at t = " + std::to_string(t));
    return v;
}

/// Cumulative integral of a nonnegative-or-general integrand, sampled on a
/// uniform grid and interpolated linearly in between. values[0] == 0.
struct CumulativeTable {
    std::vector<double> grid;    // Q + 1 strictly increasing nodes spanning [0, T]
    std::vector<double> values;  // trapezoidal cumulative integral at each node

    double at(double t) const {
        const double T = grid.back();
        const double dt = T / static_cast<double>(grid.size() - 1);
        if (t <= 0.0) return values.front();
        if (t >= T) return values.back();
        auto k = static_cast<std::size_t>(t / dt);
        if (k >= grid.size() - 1) k = grid.size() - 2;
        const double w = (t - grid[k]) / (grid[k + 1] - grid[k]);
        return values[k] + w * (values[k + 1] - values[k]);
    }
};

/// Composite trapezoid of fn over [0, t] for every node t of a uniform grid
/// with Q intervals. Deterministic; exact for linear integrands.
inline CumulativeTable cumulative(const CoefficientFn& fn, std::size_t Q, double T) {
    if (Q < 2) throw std::invalid_argument("cumulative: Q must be >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("cumulative: T must be positive");
    CumulativeTable out;
    out.grid.resize(Q + 1);
    out.values.resize(Q + 1);
    const double dt = T / static_cast<double>(Q);
    std::vector<double> f(Q + 1);
    for (std::size_t k = 0; k <= Q; ++k) {
        const double tk = (k == Q) ? T : dt * static_cast<double>(k);
        out.grid[k] = tk;
        f[k] = fn.value(tk);
        if (!std::isfinite(f[k]))
            throw NumericError("cumulative: non-finite integrand at node " + std::to_string(k) +
                               " (t = " + std::to_string(tk) + ")");
    }
    out.values[0] = 0.0;
    for (std::size_t k = 1; k <= Q; ++k)
        out.values[k] = out.values[k - 1] + 0.5 * (f[k - 1] + f[k]) * (out.grid[k] - out.grid[k - 1]);
    return out;
}

}  // namespace bridgestop
