#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/graph.hpp"
#include "ricci/simplex.hpp"

namespace ricci {

enum class CurvatureKind { forman, lly };

struct CurvatureVector {
    CurvatureKind kind = CurvatureKind::forman;
    std::vector<double> values;  // one per edge, in edge order

    double operator[](EdgeIndex e) const { return values[e]; }
    std::size_t size() const { return values.size(); }
};

/// Δf(x) = (1/m1(x)) Σ_{y∼x} m2(x,y)(f(y) − f(x)).
inline double laplacian_apply(const MeasuredGraph& g, std::span<const double> f, VertexIndex x) {
    if (f.size() != g.num_vertices()) throw InputError("function must be defined on every vertex");
    double s = 0;
    for (auto e : g.incident(x)) s += g.m2(e) * (f[g.edge(e).other(x)] - f[x]);
    return s / g.m1(x);
}

/// Weighted Forman curvature of an edge in the face-free graph.
inline double forman_edge(const MeasuredGraph& g, const MetricAssignment& w, EdgeIndex e) {
    check_aligned(g, w);
    const auto& ed = g.edge(e);
    double value = 0;
    for (auto end : {ed.u, ed.v}) {
        value += g.m2(e) / g.m1(end);
        for (auto other : g.incident(end)) {
            if (other == e) continue;
            value -= g.m2(other) / g.m1(end) * (w[other] / w[e]);
        }
    }
    return value;
}

inline CurvatureVector forman_curvature(const MeasuredGraph& g, const MetricAssignment& w) {
    CurvatureVector out{CurvatureKind::forman, {}};
    out.values.reserve(g.num_edges());
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) out.values.push_back(forman_edge(g, w, e));
    return out;
}

struct TwoCell {
    std::vector<VertexIndex> cycle;  // closed: last vertex is adjacent to the first
    double measure = 1.0;            // m3
};

/// A graph together with a set of 2-cells glued along cycles.
class TwoCellComplex {
public:
    TwoCellComplex(MeasuredGraph base, std::vector<TwoCell> cells)
        : base_(std::move(base)), cells_(std::move(cells)) {
        std::set<std::vector<VertexIndex>> canonical;
        for (const auto& c : cells_) {
            const auto n = c.cycle.size();
            if (n < 3) throw InputError("a 2-cell needs a cycle of length at least 3");
            if (!(c.measure > 0)) throw InputError("2-cell measure must be positive");
            std::vector<EdgeIndex> boundary;
            std::set<VertexIndex> distinct(c.cycle.begin(), c.cycle.end());
            if (distinct.size() != n) throw InputError("2-cell cycle repeats a vertex");
            for (std::size_t i = 0; i < n; ++i) {
                auto a = c.cycle[i];
                auto b = c.cycle[(i + 1) % n];
                base_.check_vertex(a);
                auto e = base_.find_edge(a, b);
                if (!e) {
                    throw InputError("2-cell boundary uses non-edge " + base_.vertex_id(a) + "-" +
                                     base_.vertex_id(b));
                }
                boundary.push_back(*e);
            }
            if (!canonical.insert(canonical_form(c.cycle)).second) {
                throw InputError("duplicate 2-cell (same cycle up to rotation/reflection)");
            }
            std::sort(boundary.begin(), boundary.end());
            boundaries_.push_back(std::move(boundary));
        }
    }

    const MeasuredGraph& base() const { return base_; }
    const std::vector<TwoCell>& cells() const { return cells_; }

    bool contains(std::size_t cell, EdgeIndex e) const {
        return std::binary_search(boundaries_[cell].begin(), boundaries_[cell].end(), e);
    }

private:
    static std::vector<VertexIndex> canonical_form(const std::vector<VertexIndex>& cyc) {
        const auto n = cyc.size();
        std::vector<VertexIndex> best;
        for (std::size_t k = 0; k < n; ++k) {
            for (int dir : {1, -1}) {
                std::vector<VertexIndex> cand(n);
                for (std::size_t i = 0; i < n; ++i) {
                    auto idx = (k + n + static_cast<std::size_t>(dir) * i) % n;
                    cand[i] = cyc[idx];
                }
                if (best.empty() || cand < best) best = std::move(cand);
            }
        }
        return best;
    }

    MeasuredGraph base_;
    std::vector<TwoCell> cells_;
    std::vector<std::vector<EdgeIndex>> boundaries_;
};

/// Weighted Forman curvature of an edge in a 2-dimensional cell complex.
inline double forman_cell_edge(const TwoCellComplex& k, const MetricAssignment& w, EdgeIndex e) {
    const auto& g = k.base();
    check_aligned(g, w);
    const auto& ed = g.edge(e);
    const auto ncells = k.cells().size();

    auto face_part = [&](EdgeIndex other) {
        double s = 0;
        for (std::size_t f = 0; f < ncells; ++f)
            if (k.contains(f, e) && k.contains(f, other)) s += k.cells()[f].measure / g.m2(e);
        return s;
    };

    // Same accumulation order as forman_edge, so an empty complex agrees bitwise.
    double value = 0;
    for (auto end : {ed.u, ed.v}) {
        value += g.m2(e) / g.m1(end);
        for (auto other : g.incident(end)) {
            if (other == e) continue;
            const double vertex_part = g.m2(other) / g.m1(end);
            const double faces = face_part(other);
            value -= faces == 0.0 ? vertex_part * (w[other] / w[e])
                                  : (w[other] / w[e]) * std::abs(vertex_part - faces);
        }
    }
    for (std::size_t f = 0; f < ncells; ++f)
        if (k.contains(f, e)) value += k.cells()[f].measure / g.m2(e);
    // Edges that share only a face with e.
    for (EdgeIndex other = 0; other < g.num_edges(); ++other) {
        if (other == e || ed.shared_vertex(g.edge(other))) continue;
        value -= (w[other] / w[e]) * face_part(other);
    }
    return value;
}

/// Lazy random-walk distribution m_x^ε.
struct ProbabilityKernel {
    VertexIndex base = 0;
    double epsilon = 0;
    std::vector<double> masses;  // indexed by vertex
};

inline ProbabilityKernel kernel(const MeasuredGraph& g, VertexIndex x, double epsilon) {
    const double deg = deg_measure(g, x);
    if (!(epsilon > 0)) throw InputError("epsilon must be positive");
    if (epsilon * deg >= 1.0) {
        throw EpsilonTooLarge("epsilon " + std::to_string(epsilon) + " must be below 1/Deg = " +
                              std::to_string(1.0 / deg) + " at vertex '" + g.vertex_id(x) + "'");
    }
    ProbabilityKernel k{x, epsilon, std::vector<double>(g.num_vertices(), 0.0)};
    k.masses[x] = 1.0 - epsilon * deg;
    for (auto e : g.incident(x)) k.masses[g.edge(e).other(x)] = epsilon * g.m2(e) / g.m1(x);
    return k;
}

/// Exact optimal transport cost between two kernels under d_ω.
inline double wasserstein(const MeasuredGraph& g, const MetricAssignment& w,
                          const ProbabilityKernel& mu, const ProbabilityKernel& nu) {
    check_aligned(g, w);
    if (mu.masses.size() != g.num_vertices() || nu.masses.size() != g.num_vertices()) {
        throw InputError("kernels do not belong to this graph");
    }
    std::vector<VertexIndex> src;
    std::vector<VertexIndex> dst;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (mu.masses[v] > 0) src.push_back(v);
        if (nu.masses[v] > 0) dst.push_back(v);
    }
    std::vector<std::vector<double>> dist;
    for (auto s : src) dist.push_back(distances_from(g, w, s));

    lp::LinearProgram prog;
    std::vector<std::vector<std::size_t>> plan(src.size(), std::vector<std::size_t>(dst.size()));
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < dst.size(); ++j) plan[i][j] = prog.add_variable(dist[i][dst[j]]);
    for (std::size_t i = 0; i < src.size(); ++i) {
        std::vector<lp::Term> row;
        for (std::size_t j = 0; j < dst.size(); ++j) row.push_back({plan[i][j], 1.0});
        prog.add_constraint(std::move(row), lp::Relation::equal, mu.masses[src[i]]);
    }
    // The last target marginal follows from the others and total mass.
    for (std::size_t j = 0; j + 1 < dst.size(); ++j) {
        std::vector<lp::Term> col;
        for (std::size_t i = 0; i < src.size(); ++i) col.push_back({plan[i][j], 1.0});
        prog.add_constraint(std::move(col), lp::Relation::equal, nu.masses[dst[j]]);
    }
    auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) throw LpError("transport problem has no optimal plan");
    return std::max(0.0, sol.objective);
}

namespace detail {

template <class Distance>
double lly_local(const MeasuredGraph& g, EdgeIndex e, const Distance& dist) {
    const auto x = g.edge(e).u;
    const auto y = g.edge(e).v;
    const double d = dist(x, y);

    // The objective only sees N(x) ∪ N(y); any 1-Lipschitz function on that
    // set extends to the whole graph, so pairwise d_ω constraints suffice.
    std::vector<VertexIndex> free;
    for (auto end : {x, y})
        for (auto inc : g.incident(end)) {
            auto z = g.edge(inc).other(end);
            if (z != x && z != y && std::find(free.begin(), free.end(), z) == free.end())
                free.push_back(z);
        }

    // Gauge f(x) = 0, f(y) = d; substitute f(z) = g_z − d(x,z) with g_z ≥ 0.
    std::vector<double> shift(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) shift[i] = dist(x, free[i]);
    auto slot = [&](VertexIndex z) -> std::optional<std::size_t> {
        auto it = std::find(free.begin(), free.end(), z);
        if (it == free.end()) return std::nullopt;
        return static_cast<std::size_t>(it - free.begin());
    };

    // (Δf(x) − Δf(y)) / d as constant + Σ coef_i f(z_i).
    std::vector<double> coef(free.size(), 0.0);
    double constant = 0;
    for (auto inc : g.incident(x)) {
        auto z = g.edge(inc).other(x);
        double a = g.m2(inc) / g.m1(x);
        if (z == y)
            constant += a * d;
        else
            coef[*slot(z)] += a;
    }
    for (auto inc : g.incident(y)) {
        auto z = g.edge(inc).other(y);
        double a = g.m2(inc) / g.m1(y);
        if (z == x)
            constant -= a * (0.0 - d);
        else {
            coef[*slot(z)] -= a;
            constant += a * d;
        }
    }

    lp::LinearProgram prog;
    for (std::size_t i = 0; i < free.size(); ++i) {
        prog.add_variable(coef[i] / d);
        constant -= coef[i] * shift[i];
    }
    prog.set_constant(constant / d);
    for (std::size_t i = 0; i < free.size(); ++i) {
        const auto z = free[i];
        // |f(z) − f(x)| ≤ d(x,z): lower half is g_z ≥ 0.
        prog.add_constraint({{i, 1.0}}, lp::Relation::less_equal, 2 * shift[i]);
        // |f(z) − f(y)| ≤ d(y,z)
        const double dy = dist(y, z);
        prog.add_constraint({{i, 1.0}}, lp::Relation::less_equal, dy + d + shift[i]);
        prog.add_constraint({{i, 1.0}}, lp::Relation::greater_equal, d - dy + shift[i]);
        for (std::size_t j = i + 1; j < free.size(); ++j) {
            const double dz = dist(z, free[j]);
            const double off = shift[i] - shift[j];
            prog.add_constraint({{i, 1.0}, {j, -1.0}}, lp::Relation::less_equal, dz + off);
            prog.add_constraint({{i, 1.0}, {j, -1.0}}, lp::Relation::greater_equal, -dz + off);
        }
    }
    auto sol = lp::solve(prog);
    if (sol.status == lp::Status::unbounded) throw LpError("curvature program is unbounded");
    if (sol.status != lp::Status::optimal) throw LpError("curvature program has no optimum");
    return sol.objective;
}

/// Lin-Lu-Yau curvature of every edge without the degeneracy check.
inline std::vector<double> lly_all_unchecked(const MeasuredGraph& g, const MetricAssignment& w) {
    const auto d = all_pairs_distances(g, w);
    auto dist = [&](VertexIndex a, VertexIndex b) {
        return d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    };
    std::vector<double> out(g.num_edges());
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) out[e] = lly_local(g, e, dist);
    return out;
}

}  // namespace detail

/// Lin-Lu-Yau curvature of one edge, solved as the limit-free Lipschitz
/// program: minimize (Δf(x) − Δf(y))/d over 1-Lipschitz f with
/// f(y) − f(x) = d_ω(x,y).
inline double lly_edge(const MeasuredGraph& g, const MetricAssignment& w, EdgeIndex e) {
    check_aligned(g, w);
    const auto& ed = g.edge(e);
    if (w[e] >= detour_length(g, w, e) - kSurgeryTolerance) {
        throw DegenerateMetric("edge " + g.edge_label(e) + " is not the unique shortest path");
    }
    // Distances are only needed from the endpoints and their neighbours.
    std::vector<VertexIndex> sources{ed.u, ed.v};
    for (auto end : {ed.u, ed.v})
        for (auto inc : g.incident(end)) sources.push_back(g.edge(inc).other(end));
    std::vector<std::pair<VertexIndex, std::vector<double>>> rows;
    for (auto s : sources) {
        bool have = false;
        for (const auto& r : rows) have = have || r.first == s;
        if (!have) rows.emplace_back(s, distances_from(g, w, s));
    }
    auto dist = [&](VertexIndex a, VertexIndex b) {
        for (const auto& r : rows)
            if (r.first == a) return r.second[b];
        throw LpError("missing distance row");
    };
    return detail::lly_local(g, e, dist);
}

inline CurvatureVector lly_curvature(const MeasuredGraph& g, const MetricAssignment& w) {
    if (auto bad = surgery_scan(g, w); !bad.empty()) {
        throw DegenerateMetric("edge " + g.edge_label(bad.front()) + " is not the unique shortest path");
    }
    return {CurvatureKind::lly, detail::lly_all_unchecked(g, w)};
}

/// ε used by the transport-limit oracle: 1/(4 max Deg).
inline double default_oracle_epsilon(const MeasuredGraph& g) { return 1.0 / (4.0 * max_deg_measure(g)); }

/// (1 − W(m_x^ε, m_y^ε)/d_ω(x,y)) / ε, the finite-ε transport estimate.
inline double lly_limit_estimate(const MeasuredGraph& g, const MetricAssignment& w, EdgeIndex e,
                                 double epsilon) {
    const auto& ed = g.edge(e);
    const double bound = 1.0 / std::max(deg_measure(g, ed.u), deg_measure(g, ed.v));
    if (epsilon >= bound) {
        throw EpsilonTooLarge("epsilon must be below 1/max(Deg(x), Deg(y)) = " + std::to_string(bound));
    }
    auto mx = kernel(g, ed.u, epsilon);
    auto my = kernel(g, ed.v, epsilon);
    const double d = shortest_distance(g, w, ed.u, ed.v);
    return (1.0 - wasserstein(g, w, mx, my) / d) / epsilon;
}

}  // namespace ricci
