#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include "bridgestop/kernel.hpp"

namespace bridgestop {

enum class MeshKind { log_spaced, uniform, custom };

/// Strictly increasing partition t_0 = 0 < t_1 < ... < t_N = T.
struct Mesh {
    std::vector<double> nodes;
    MeshKind kind = MeshKind::custom;

    std::size_t N() const { return nodes.size() - 1; }
    double T() const { return nodes.back(); }

    void validate() const {
        if (nodes.size() < 3) throw std::invalid_argument("Mesh: need N >= 2");
        if (nodes.front() != 0.0) throw std::invalid_argument("Mesh: t_0 must be exactly 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw std::invalid_argument("Mesh: nodes must be strictly increasing");
    }
};

/// t_i = T ln(1 + i (e - 1)/N): increments shrink smoothly toward the
/// horizon, where the boundary is steepest. Endpoints are exact.
inline Mesh log_mesh(std::size_t N, double T) {
    if (N < 2) throw std::invalid_argument("log_mesh: need N >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("log_mesh: need T > 0");
    Mesh m;
    m.kind = MeshKind::log_spaced;
    m.nodes.resize(N + 1);
    const double e1 = std::exp(1.0) - 1.0;
    m.nodes[0] = 0.0;
    for (std::size_t i = 1; i < N; ++i)
        m.nodes[i] = T * std::log1p(static_cast<double>(i) * e1 / static_cast<double>(N));
    m.nodes[N] = T;
    return m;
}

inline Mesh uniform_mesh(std::size_t N, double T) {
    if (N < 2) throw std::invalid_argument("uniform_mesh: need N >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("uniform_mesh: need T > 0");
    Mesh m;
    m.kind = MeshKind::uniform;
    m.nodes.resize(N + 1);
    for (std::size_t i = 0; i < N; ++i) m.nodes[i] = T * static_cast<double>(i) / static_cast<double>(N);
    m.nodes[N] = T;
    return m;
}

/// Optimal stopping boundary sampled on a mesh, pinned b_{N-1} = b_N = z.
struct Boundary {
    Mesh mesh;
    std::vector<double> values;

    /// Linear interpolation between nodes; beyond t_{N-1} the boundary is
    /// clamped to the pinned value.
    double at(double t) const {
        const auto& ts = mesh.nodes;
        const std::size_t N = mesh.N();
        if (t <= ts.front()) return values.front();
        if (t >= ts[N - 1]) return values[N];
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
    }
};

struct SolverConfig {
    std::size_t N = 500;      // mesh intervals
    double tol = 1e-3;        // threshold on the relative squared L2 step distance
    std::size_t max_iter = 100;
    std::size_t Q = 0;        // quadrature resolution; 0 means 10 * N

    std::size_t quadrature() const { return Q == 0 ? 10 * N : Q; }

    void validate() const {
        if (N < 2) throw std::invalid_argument("SolverConfig: need N >= 2");
        if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: need tol > 0");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: need max_iter >= 1");
    }
};

struct ConvergenceLog {
    std::vector<double> d;  // step metric per iteration
    bool converged = false;
    std::size_t iterations = 0;
};

namespace detail {

/// Static row partition; each worker writes disjoint slots, so results are
/// bitwise independent of the thread count. The first worker exception is
/// rethrown on the calling thread.
template <typename Fn>
void parallel_rows(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned nw = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::vector<std::exception_ptr> errors(nw);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([=, &fn, &errors] {
            try {
                for (std::size_t i = w; i < n; i += nw) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// One fixed-point sweep of the discretized free-boundary equation:
///   b_i <- z - sum_{j=i}^{N-2} K(t_i, b_i^prev, t_{j+1}, b_{j+1}^prev) (t_{j+1} - t_j)
/// for i <= N-2, with the pinned tail b_{N-1} = b_N = z. The (N-1)-addend is
/// skipped because K(t, x, T, z) is not defined. Rows only read the previous
/// boundary and each row sums j in a fixed order, so the sweep is
/// deterministic under any thread count.
inline Boundary picard_step(const BridgeTables& tb, const Mesh& mesh, const Boundary& prev,
                            unsigned threads = 1) {
    const std::size_t N = mesh.N();
    const auto& ts = mesh.nodes;
    const double z = tb.z();

    Boundary next;
    next.mesh = mesh;
    next.values.assign(N + 1, z);

    detail::parallel_rows(N - 1, threads, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = i; j + 1 < N; ++j) {
            const double k = eval_kernel(tb, ts[i], prev.values[i], ts[j + 1], prev.values[j + 1]);
            if (!std::isfinite(k))
                throw NumericError("picard_step: non-finite kernel at (i, j) = (" + std::to_string(i) +
                                   ", " + std::to_string(j) + ")");
            acc += k * (ts[j + 1] - ts[j]);
        }
        next.values[i] = z - acc;
    });
    return next;
}

/// Relative squared L2 distance between consecutive boundaries,
///   d = sum_{i=1}^N (b_i - b'_i)^2 (t_i - t_{i-1}) / sum_{i=1}^N b_i^2 (t_i - t_{i-1}),
/// with b the newer iterate. A vanishing denominator throws unless
/// absolute_fallback is set, in which case the (absolute) numerator is
/// returned instead.
inline double converge_metric(const Boundary& b_new, const Boundary& b_old,
                              bool absolute_fallback = false) {
    if (b_new.values.size() != b_old.values.size())
        throw std::invalid_argument("converge_metric: boundaries on different meshes");
    const auto& ts = b_new.mesh.nodes;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < b_new.values.size(); ++i) {
        const double dt = ts[i] - ts[i - 1];
        const double diff = b_new.values[i] - b_old.values[i];
        num += diff * diff * dt;
        den += b_new.values[i] * b_new.values[i] * dt;
    }
    if (den <= 0.0) {
        if (absolute_fallback) return num;
        throw DegeneracyError("converge_metric: zero denominator (boundary identically zero)");
    }
    return num / den;
}

/// Picard iteration from the flat start b^(0) = z until the step metric
/// drops to tol or max_iter is hit. Non-convergence is reported in the log,
/// not thrown, so callers can still inspect the last iterate.
inline std::pair<Boundary, ConvergenceLog> picard_solve(const BridgeTables& tb, const Mesh& mesh,
                                                        const SolverConfig& cfg,
                                                        unsigned threads = 1) {
    cfg.validate();
    mesh.validate();

    Boundary b;
    b.mesh = mesh;
    b.values.assign(mesh.N() + 1, tb.z());

    ConvergenceLog log;
    for (std::size_t k = 0; k < cfg.max_iter; ++k) {
        Boundary next = picard_step(tb, mesh, b, threads);
        const double d = converge_metric(next, b, /*absolute_fallback=*/true);
        log.d.push_back(d);
        b = std::move(next);
        ++log.iterations;
        if (d <= cfg.tol) {
            log.converged = true;
            break;
        }
    }
    return {std::move(b), std::move(log)};
}

inline std::pair<Boundary, ConvergenceLog> picard_solve(const BridgeTables& tb,
                                                        const SolverConfig& cfg,
                                                        unsigned threads = 1) {
    return picard_solve(tb, log_mesh(cfg.N, tb.T()), cfg, threads);
}

/// Value function under a stopping boundary:
///   V(t, x) = z - int_t^T K(t, x, u, b(u)) du,
/// discretized by the solver's right Riemann rule on the sub-mesh past t,
/// with the final sub-interval at T dropped. On the stopping side
/// (x >= b(t)) the value equals the gain identically, and that identity is
/// returned directly; V(T, .) = z by convention.
inline double value_at(const BridgeTables& tb, const Boundary& b, double t, double x) {
    if (!std::isfinite(x)) throw std::domain_error("value_at: x must be finite");
    const double T = tb.T();
    if (!(t >= 0.0 && t <= T)) throw std::domain_error("value_at: need 0 <= t <= T");
    if (t >= T) return tb.z();
    if (x >= b.at(t)) return x;

    const auto& ts = b.mesh.nodes;
    const std::size_t N = b.mesh.N();
    // First node strictly past t; the interval [t, ts[first]] is the
    // leading (possibly partial) piece of the right Riemann sum.
    std::size_t first = static_cast<std::size_t>(
        std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    double acc = 0.0;
    double left = t;
    for (std::size_t j = first; j < N; ++j) {  // j == N is the dropped endpoint at T
        acc += eval_kernel(tb, t, x, ts[j], b.values[j]) * (ts[j] - left);
        left = ts[j];
    }
    return tb.z() - acc;
}

/// Relative squared L2 residual of a boundary in the discretized
/// free-boundary equation (same metric and weights as converge_metric).
/// Zero for the exact discrete fixed point.
inline double boundary_residual(const BridgeTables& tb, const Boundary& b, unsigned threads = 1) {
    Boundary mapped = picard_step(tb, b.mesh, b, threads);
    return converge_metric(mapped, b, /*absolute_fallback=*/true);
}

}  // namespace bridgestop
