#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/curvature.hpp"
#include "ricci/error.hpp"
#include "ricci/graph.hpp"
#include "ricci/spectral.hpp"

namespace ricci {

/// One recorded state of a flow.
///
/// The metric is `weights * exp(log_scale)`. Exact spectral solutions factor
/// out exp(λ_max t) once it would leave double range, so long horizons keep
/// a usable direction even when the raw weights overflow or underflow.
struct FlowSample {
    double t = 0;
    std::vector<double> weights;
    double log_scale = 0;
    CurvatureVector kappa;
    std::size_t graph_index = 0;  // into FlowTrajectory::graph_snapshots

    double omega(EdgeIndex e) const { return weights[e] * std::exp(log_scale); }

    std::vector<double> normalized() const {
        double total = 0;
        for (double w : weights) total += w;
        std::vector<double> out(weights);
        for (auto& w : out) w /= total;
        return out;
    }
};

struct FlowTrajectory {
    std::vector<FlowSample> samples;
    std::vector<SurgeryEvent> surgeries;
    std::vector<MeasuredGraph> graph_snapshots;  // [0] is the input graph

    const MeasuredGraph& graph_of(const FlowSample& s) const { return graph_snapshots.at(s.graph_index); }
};

/// Σ_i c(i,l) exp((λ_i − λ_max) t): the metric at time t up to the factor
/// exp(λ_max t).
inline Eigen::VectorXd spectral_profile(const SpectralData& sd, const Eigen::MatrixXd& coeffs, double t) {
    const auto n = sd.size();
    const double top = sd.lambda_max();
    Eigen::VectorXd growth(n);
    for (Eigen::Index i = 0; i < n; ++i) growth(i) = std::exp((sd.eigenvalues(i) - top) * t);
    return coeffs.transpose() * growth;
}

/// Horizon at which every subdominant mode has decayed by e^{-40}.
inline double long_time_horizon(const SpectralData& sd) {
    const double gap = sd.spectral_gap();
    if (std::isfinite(gap) && gap > 0) return 40.0 / gap;
    return 40.0 / std::abs(sd.lambda_max());
}

namespace detail {

inline void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0) || !std::isfinite(times[i])) throw InputError("sample times must be finite and nonnegative");
        if (i > 0 && !(times[i] > times[i - 1])) throw InputError("sample times must be strictly increasing");
    }
}

}  // namespace detail

/// Closed-form Forman flow ω(t) = e^{tF} ω0 via the eigenbasis of F̃.
inline FlowTrajectory forman_flow_exact(const MeasuredGraph& g, const MetricAssignment& w0,
                                        std::span<const double> times) {
    check_aligned(g, w0);
    detail::check_times(times);
    const auto fm = build_flow_matrix(g);
    const auto sd = eigendecompose(fm);
    const auto coeffs = flow_coefficients(sd, fm, w0);

    FlowTrajectory traj;
    traj.graph_snapshots.push_back(g);
    for (double t : times) {
        FlowSample s;
        s.t = t;
        if (t == 0.0) {
            s.weights.assign(w0.values().begin(), w0.values().end());
        } else {
            const Eigen::VectorXd p = spectral_profile(sd, coeffs, t);
            s.weights.assign(p.data(), p.data() + p.size());
            const double shift = sd.lambda_max() * t;
            if (std::abs(shift) < 600.0) {
                const double f = std::exp(shift);
                for (auto& w : s.weights) w *= f;
            } else {
                s.log_scale = shift;
            }
        }
        for (double w : s.weights) {
            if (!(w > 0) || !std::isfinite(w)) {
                throw NumericalError("spectral solution lost positivity at t = " + std::to_string(t));
            }
        }
        s.kappa = forman_curvature(g, MetricAssignment(s.weights));
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

/// Evenly spaced times 0, dt, 2dt, …, with t_end as the last entry.
inline std::vector<double> time_grid(double t_end, double dt) {
    if (!(t_end >= 0) || !(dt > 0)) throw InputError("need t_end >= 0 and dt > 0");
    std::vector<double> ts{0.0};
    for (std::size_t k = 1;; ++k) {
        double t = static_cast<double>(k) * dt;
        if (t >= t_end - 1e-12 * std::max(1.0, t_end)) break;
        ts.push_back(t);
    }
    if (t_end > 0) ts.push_back(t_end);
    return ts;
}

inline constexpr int kMaxStepHalvings = 20;

/// RK4 integration of dω/dt = −κ_ω ω with Lin-Lu-Yau curvature recomputed at
/// every stage. With `surgery`, violating edges are removed before each step.
inline FlowTrajectory lly_flow_integrate(const MeasuredGraph& g, const MetricAssignment& w0, double t_end,
                                         double dt, bool surgery) {
    check_aligned(g, w0);
    if (!(t_end >= 0) || !std::isfinite(t_end)) throw InputError("t_end must be finite and nonnegative");
    if (!(dt > 0)) throw InputError("dt must be positive");
    if (!surgery) {
        if (auto bad = surgery_scan(g, w0); !bad.empty()) {
            throw DegenerateMetric("edge " + g.edge_label(bad.front()) + " is not the unique shortest path");
        }
    }

    FlowTrajectory traj;
    traj.graph_snapshots.push_back(g);
    std::vector<double> w(w0.values().begin(), w0.values().end());

    auto rate = [&](const MeasuredGraph& graph, const std::vector<double>& x) -> std::optional<std::vector<double>> {
        for (double v : x)
            if (!(v > 0) || !std::isfinite(v)) return std::nullopt;
        auto k = detail::lly_all_unchecked(graph, MetricAssignment(x));
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -k[i] * x[i];
        return out;
    };

    auto rk4 = [&](const MeasuredGraph& graph, std::vector<double> x, double h,
                   int substeps) -> std::optional<std::vector<double>> {
        const double hs = h / substeps;
        const auto n = x.size();
        std::vector<double> tmp(n);
        for (int s = 0; s < substeps; ++s) {
            auto k1 = rate(graph, x);
            if (!k1) return std::nullopt;
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * hs * (*k1)[i];
            auto k2 = rate(graph, tmp);
            if (!k2) return std::nullopt;
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * hs * (*k2)[i];
            auto k3 = rate(graph, tmp);
            if (!k3) return std::nullopt;
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + hs * (*k3)[i];
            auto k4 = rate(graph, tmp);
            if (!k4) return std::nullopt;
            for (std::size_t i = 0; i < n; ++i)
                x[i] += hs / 6.0 * ((*k1)[i] + 2 * (*k2)[i] + 2 * (*k3)[i] + (*k4)[i]);
            for (double v : x)
                if (!(v > 0) || !std::isfinite(v)) return std::nullopt;
        }
        return x;
    };

    auto record = [&](double t) {
        const auto& graph = traj.graph_snapshots.back();
        FlowSample s;
        s.t = t;
        s.weights = w;
        s.kappa = {CurvatureKind::lly, detail::lly_all_unchecked(graph, MetricAssignment(w))};
        s.graph_index = traj.graph_snapshots.size() - 1;
        traj.samples.push_back(std::move(s));
    };

    const auto grid = time_grid(t_end, dt);
    const bool keep_all = g.num_edges() <= 64;
    record(0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double t0 = grid[k];
        if (surgery) {
            auto res = apply_surgery(traj.graph_snapshots.back(), MetricAssignment(w), t0);
            if (!res.events.empty()) {
                for (auto& ev : res.events) traj.surgeries.push_back(std::move(ev));
                w.assign(res.metric.values().begin(), res.metric.values().end());
                traj.graph_snapshots.push_back(std::move(res.graph));
            }
        }
        const auto& graph = traj.graph_snapshots.back();
        std::optional<std::vector<double>> next;
        int substeps = 1;
        for (int attempt = 0; attempt <= kMaxStepHalvings && !next; ++attempt, substeps *= 2) {
            next = rk4(graph, w, grid[k + 1] - t0, substeps);
        }
        if (!next) {
            throw StepSizeTooLarge("weights became nonpositive near t = " + std::to_string(t0) +
                                   " even after halving the step " + std::to_string(kMaxStepHalvings) +
                                   " times");
        }
        w = std::move(*next);
        const bool last = k + 2 == grid.size();
        if (keep_all || last || (k + 1) % 10 == 0) record(grid[k + 1]);
    }
    return traj;
}

/// Rescales every sample to total weight 1; curvature is scale invariant.
inline FlowTrajectory normalized_trajectory(FlowTrajectory traj) {
    for (auto& s : traj.samples) {
        s.weights = s.normalized();
        s.log_scale = 0;
    }
    return traj;
}

namespace detail {

/// First-derivative weights at `x0` for the given nodes (Fornberg's recursion).
inline std::vector<double> derivative_weights(double x0, std::span<const double> nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        double c2 = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                c[i][1] = c1 * (c[i - 1][0] - (nodes[i - 1] - x0) * c[i - 1][1]) / c2;
                c[i][0] = -c1 * (nodes[i - 1] - x0) * c[i - 1][0] / c2;
            }
            c[j][1] = ((nodes[i] - x0) * c[j][1] - c[j][0]) / c3;
            c[j][0] = (nodes[i] - x0) * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

}  // namespace detail

/// max |dω/dt + κω| over interior samples. dω/dt comes from a five-sample
/// window around each sample (shifted inward at the ends), or three samples
/// when fewer are available on the same graph.
inline double curvature_residual(const FlowTrajectory& traj, const FlowMatrix& fm) {
    const auto& ss = traj.samples;
    if (ss.size() < 3) throw InputError("residual needs at least three samples");
    double worst = 0;
    for (std::size_t i = 1; i + 1 < ss.size(); ++i) {
        const auto& b = ss[i];
        if (static_cast<Eigen::Index>(b.weights.size()) != fm.size()) {
            throw InputError("flow matrix does not match the trajectory's edge count");
        }
        // Widest window of up to five samples on b's graph that contains i.
        std::size_t lo = i;
        std::size_t hi = i;
        while (hi - lo + 1 < 5) {
            const bool left = lo > 0 && ss[lo - 1].graph_index == b.graph_index;
            const bool right = hi + 1 < ss.size() && ss[hi + 1].graph_index == b.graph_index;
            if (!left && !right) break;
            if (left && (!right || i - lo <= hi - i))
                --lo;
            else
                ++hi;
        }
        if (hi - lo + 1 < 3) continue;

        std::vector<double> nodes;
        for (std::size_t k = lo; k <= hi; ++k) nodes.push_back(ss[k].t);
        const auto w = detail::derivative_weights(b.t, nodes);
        for (EdgeIndex e = 0; e < b.weights.size(); ++e) {
            double deriv = 0;
            for (std::size_t k = 0; k < nodes.size(); ++k) deriv += w[k] * ss[lo + k].omega(e);
            worst = std::max(worst, std::abs(deriv + b.kappa[e] * b.omega(e)));
        }
    }
    return worst;
}

}  // namespace ricci
