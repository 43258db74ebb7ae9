#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricci/error.hpp"
#include "ricci/graph.hpp"
#include "ricci/jacobi.hpp"

namespace ricci {

/// Linear generator of the Forman flow dω/dt = Fω and its symmetrization
/// F̃ = M F M⁻¹ with M = diag(√m2).
struct FlowMatrix {
    Eigen::MatrixXd F;
    Eigen::VectorXd sqrt_m2;  // diagonal of M
    Eigen::MatrixXd Ftilde;

    Eigen::MatrixXd M() const { return sqrt_m2.asDiagonal(); }
    Eigen::Index size() const { return F.rows(); }
};

inline FlowMatrix build_flow_matrix(const MeasuredGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_edges());
    FlowMatrix fm;
    fm.F = Eigen::MatrixXd::Zero(n, n);
    fm.sqrt_m2.resize(n);
    for (EdgeIndex i = 0; i < g.num_edges(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto& e = g.edge(i);
        fm.sqrt_m2(ii) = std::sqrt(g.m2(i));
        fm.F(ii, ii) = -(g.m2(i) / g.m1(e.u) + g.m2(i) / g.m1(e.v));
        for (auto end : {e.u, e.v}) {
            for (auto j : g.incident(end)) {
                if (j == i) continue;
                fm.F(ii, static_cast<Eigen::Index>(j)) += g.m2(j) / g.m1(end);
            }
        }
    }
    Eigen::MatrixXd t = fm.sqrt_m2.asDiagonal() * fm.F * fm.sqrt_m2.cwiseInverse().asDiagonal();
    fm.Ftilde = 0.5 * (t + t.transpose());
    return fm;
}

struct SpectralData {
    Eigen::VectorXd eigenvalues;   // λ_1 ≤ … ≤ λ_n
    Eigen::MatrixXd eigenvectors;  // column i is p_i; p_n is entrywise positive

    Eigen::Index size() const { return eigenvalues.size(); }
    double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
    Eigen::VectorXd perron() const { return eigenvectors.col(eigenvectors.cols() - 1); }

    /// λ_n − λ_{n−1}; +∞ for a 1×1 system.
    double spectral_gap() const {
        const auto n = eigenvalues.size();
        if (n < 2) return std::numeric_limits<double>::infinity();
        return eigenvalues(n - 1) - eigenvalues(n - 2);
    }
};

inline constexpr double kSimplicityGap = 1e-10;

namespace detail {

/// Eigendecomposition of a symmetric irreducible matrix with nonnegative
/// off-diagonal entries, with the top eigenvector sign-fixed positive.
inline SpectralData perron_decomposition(const Eigen::MatrixXd& a) {
    auto eig = jacobi_eigen(a);
    SpectralData sd{std::move(eig.values), std::move(eig.vectors)};
    const auto n = sd.eigenvalues.size();
    if (n >= 2 && sd.spectral_gap() <= kSimplicityGap) {
        throw ConvergenceFailure("largest eigenvalue is not simple (gap " +
                                 std::to_string(sd.spectral_gap()) + "); input may be corrupt");
    }
    auto top = sd.eigenvectors.col(n - 1);
    Eigen::Index arg = 0;
    top.cwiseAbs().maxCoeff(&arg);
    if (top(arg) < 0) top = -top;
    if ((top.array() <= 0.0).any()) {
        throw ConvergenceFailure("Perron eigenvector is not strictly positive");
    }
    return sd;
}

}  // namespace detail

inline SpectralData eigendecompose(const FlowMatrix& fm) { return detail::perron_decomposition(fm.Ftilde); }

/// c(i, l) = p_il/√m2(e_l) · Σ_j p_ij ω0_j √m2(e_j), so that
/// ω(t, e_l) = Σ_i c(i, l) exp(λ_i t).
inline Eigen::MatrixXd flow_coefficients(const SpectralData& sd, const FlowMatrix& fm,
                                         const MetricAssignment& w0) {
    const auto n = fm.size();
    if (static_cast<Eigen::Index>(w0.size()) != n) throw InputError("initial metric size mismatch");
    Eigen::VectorXd scaled(n);
    for (Eigen::Index j = 0; j < n; ++j) scaled(j) = w0[static_cast<EdgeIndex>(j)] * fm.sqrt_m2(j);
    const Eigen::VectorXd proj = sd.eigenvectors.transpose() * scaled;  // Σ_j p_ij ω0_j √m2_j
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index l = 0; l < n; ++l) c(i, l) = sd.eigenvectors(l, i) / fm.sqrt_m2(l) * proj(i);
    return c;
}

struct CurvatureBounds {
    double lower = 0;
    double upper = 0;
};

/// Gerschgorin bracket for the limiting Forman curvature −λ_max(F̃).
///
/// The top eigenvalue lies in some disk, so the lower end is the smallest
/// disk edge over all rows; the upper end is the smallest diagonal entry.
inline CurvatureBounds curvature_bounds(const MeasuredGraph& g) {
    CurvatureBounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (EdgeIndex i = 0; i < g.num_edges(); ++i) {
        const auto& e = g.edge(i);
        const double diag = g.m2(i) / g.m1(e.u) + g.m2(i) / g.m1(e.v);
        double radius = 0;
        for (auto end : {e.u, e.v})
            for (auto j : g.incident(end))
                if (j != i) radius += std::sqrt(g.m2(i) * g.m2(j)) / g.m1(end);
        b.lower = std::min(b.lower, diag - radius);
        b.upper = std::min(b.upper, diag);
    }
    return b;
}

enum class Convergence { vanishing, constant_metric, divergent };

inline const char* to_string(Convergence c) {
    switch (c) {
        case Convergence::vanishing: return "vanishing";
        case Convergence::constant_metric: return "constant_metric";
        case Convergence::divergent: return "divergent";
    }
    return "unknown";
}

inline constexpr double kDefaultTolZero = 1e-9;

struct ConvergenceReport {
    Convergence classification = Convergence::vanishing;
    double lambda_max = 0;
    double limiting_curvature = 0;                  // −λ_max
    std::vector<double> limiting_normalized_metric; // sums to 1
    std::vector<double> leading_coefficients;       // c_n(e): the limit of ω when λ_max = 0
    CurvatureBounds bounds;
    double spectral_gap = 0;
};

/// Normalized Perron direction M⁻¹p_n / Σ(M⁻¹p_n).
inline std::vector<double> limiting_normalized_metric(const SpectralData& sd, const FlowMatrix& fm) {
    Eigen::VectorXd v = sd.perron().cwiseQuotient(fm.sqrt_m2);
    v /= v.sum();
    return {v.data(), v.data() + v.size()};
}

inline ConvergenceReport classify_convergence(const MeasuredGraph& g, const MetricAssignment& w0,
                                              double tol_zero = kDefaultTolZero) {
    check_aligned(g, w0);
    const auto fm = build_flow_matrix(g);
    const auto sd = eigendecompose(fm);
    const auto c = flow_coefficients(sd, fm, w0);

    ConvergenceReport r;
    r.lambda_max = sd.lambda_max();
    r.limiting_curvature = -r.lambda_max;
    if (r.lambda_max < -tol_zero)
        r.classification = Convergence::vanishing;
    else if (r.lambda_max > tol_zero)
        r.classification = Convergence::divergent;
    else
        r.classification = Convergence::constant_metric;
    r.limiting_normalized_metric = limiting_normalized_metric(sd, fm);
    const Eigen::VectorXd lead = c.row(c.rows() - 1).transpose();
    r.leading_coefficients.assign(lead.data(), lead.data() + lead.size());
    r.bounds = curvature_bounds(g);
    r.spectral_gap = sd.spectral_gap();
    return r;
}

struct InverseResult {
    std::optional<MetricAssignment> metric;  // normalized to total weight 1
    double lambda_max = 0;                   // λ_max(F̃ + diag κ)
};

/// Metric whose Forman curvature is `target`, if one exists: it does exactly
/// when λ_max(F̃ + diag κ) = 0, and is then M⁻¹ times the Perron vector.
inline InverseResult inverse_curvature(const MeasuredGraph& g, std::span<const double> target,
                                       double tol = 1e-9) {
    if (target.size() != g.num_edges()) throw InputError("target curvature needs one value per edge");
    const auto fm = build_flow_matrix(g);
    Eigen::MatrixXd k = fm.Ftilde;
    for (EdgeIndex i = 0; i < target.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        k(ii, ii) += target[i];
    }
    const auto sd = detail::perron_decomposition(k);
    InverseResult out;
    out.lambda_max = sd.lambda_max();
    if (std::abs(out.lambda_max) > tol) return out;
    Eigen::VectorXd w = sd.perron().cwiseQuotient(fm.sqrt_m2);
    w /= w.sum();
    out.metric = MetricAssignment(std::vector<double>(w.data(), w.data() + w.size()));
    return out;
}

enum class TreeCase { path_case, k13_case, big_degree_case };

inline const char* to_string(TreeCase c) {
    switch (c) {
        case TreeCase::path_case: return "path_case";
        case TreeCase::k13_case: return "k13_case";
        case TreeCase::big_degree_case: return "big_degree_case";
    }
    return "unknown";
}

inline bool has_uniform_measure(const MeasuredGraph& g) {
    auto one = [](double x) { return x == 1.0; };
    return std::all_of(g.vertex_measure().begin(), g.vertex_measure().end(), one) &&
           std::all_of(g.edge_measure().begin(), g.edge_measure().end(), one);
}

/// Long-time behaviour of a uniform-measure tree, read off its degrees.
inline TreeCase classify_tree_uniform(const MeasuredGraph& g) {
    if (!is_tree(g)) throw NotATree("graph is not a tree");
    if (!has_uniform_measure(g)) throw NotUniformMeasure("tree classification needs m1 = m2 = 1");
    std::vector<std::size_t> deg;
    for (VertexIndex x = 0; x < g.num_vertices(); ++x) deg.push_back(g.degree(x));
    std::sort(deg.rbegin(), deg.rend());
    if (deg.front() <= 2) return TreeCase::path_case;
    if (deg == std::vector<std::size_t>{3, 1, 1, 1}) return TreeCase::k13_case;
    return TreeCase::big_degree_case;
}

}  // namespace ricci
