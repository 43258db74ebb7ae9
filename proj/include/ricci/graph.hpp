#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/error.hpp"

namespace ricci {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

/// Distance reported between vertices with no connecting path.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// An edge is removed once its weight is within this margin of the best detour.
inline constexpr double kSurgeryTolerance = 1e-9;

struct Edge {
    VertexIndex u = 0;
    VertexIndex v = 0;

    bool touches(VertexIndex x) const { return u == x || v == x; }
    VertexIndex other(VertexIndex x) const { return x == u ? v : u; }

    /// Shared endpoint of two distinct adjacent edges.
    std::optional<VertexIndex> shared_vertex(const Edge& e) const {
        if (u == e.u || u == e.v) return u;
        if (v == e.u || v == e.v) return v;
        return std::nullopt;
    }
};

namespace detail {

inline bool connected(std::size_t num_vertices, std::span<const Edge> edges,
                      std::optional<EdgeIndex> skip = std::nullopt) {
    if (num_vertices == 0) return true;
    std::vector<std::vector<VertexIndex>> adj(num_vertices);
    for (EdgeIndex i = 0; i < edges.size(); ++i) {
        if (skip && *skip == i) continue;
        adj[edges[i].u].push_back(edges[i].v);
        adj[edges[i].v].push_back(edges[i].u);
    }
    std::vector<char> seen(num_vertices, 0);
    std::vector<VertexIndex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto y : adj[x]) {
            if (!seen[y]) {
                seen[y] = 1;
                ++count;
                stack.push_back(y);
            }
        }
    }
    return count == num_vertices;
}

inline std::pair<VertexIndex, VertexIndex> key(VertexIndex a, VertexIndex b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

/// Connected simple graph with a vertex measure m1 and an edge measure m2.
///
/// Edge order is fixed at construction and is the index order used by every
/// matrix and vector in the library.
class MeasuredGraph {
public:
    MeasuredGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges,
                  std::vector<double> m1, std::vector<double> m2)
        : ids_(std::move(vertex_ids)), edges_(std::move(edges)), m1_(std::move(m1)),
          m2_(std::move(m2)) {
        validate();
        incident_.resize(ids_.size());
        for (EdgeIndex i = 0; i < edges_.size(); ++i) {
            incident_[edges_[i].u].push_back(i);
            incident_[edges_[i].v].push_back(i);
            lookup_.emplace(detail::key(edges_[i].u, edges_[i].v), i);
        }
    }

    std::size_t num_vertices() const { return ids_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::string& vertex_id(VertexIndex x) const {
        check_vertex(x);
        return ids_[x];
    }
    const std::vector<std::string>& vertex_ids() const { return ids_; }

    VertexIndex vertex(std::string_view id) const {
        auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) throw UnknownVertex("unknown vertex '" + std::string(id) + "'");
        return static_cast<VertexIndex>(it - ids_.begin());
    }

    const Edge& edge(EdgeIndex e) const {
        check_edge(e);
        return edges_[e];
    }
    std::span<const Edge> edges() const { return edges_; }

    double m1(VertexIndex x) const {
        check_vertex(x);
        return m1_[x];
    }
    double m2(EdgeIndex e) const {
        check_edge(e);
        return m2_[e];
    }
    std::span<const double> vertex_measure() const { return m1_; }
    std::span<const double> edge_measure() const { return m2_; }

    std::span<const EdgeIndex> incident(VertexIndex x) const {
        check_vertex(x);
        return incident_[x];
    }
    std::size_t degree(VertexIndex x) const { return incident(x).size(); }

    std::optional<EdgeIndex> find_edge(VertexIndex a, VertexIndex b) const {
        auto it = lookup_.find(detail::key(a, b));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// "u-v" using the vertex identifiers.
    std::string edge_label(EdgeIndex e) const {
        const auto& ed = edge(e);
        return ids_[ed.u] + "-" + ids_[ed.v];
    }

    /// Copy with edge `e` deleted; fails if that disconnects the graph.
    MeasuredGraph without_edge(EdgeIndex e) const {
        check_edge(e);
        auto edges = edges_;
        auto m2 = m2_;
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(e));
        m2.erase(m2.begin() + static_cast<std::ptrdiff_t>(e));
        if (edges.empty() || !detail::connected(ids_.size(), edges)) {
            throw DisconnectedAfterSurgery("removing edge " + edge_label(e) +
                                           " disconnects the graph");
        }
        return MeasuredGraph(ids_, std::move(edges), m1_, std::move(m2));
    }

    MeasuredGraph with_measures(std::vector<double> m1, std::vector<double> m2) const {
        return MeasuredGraph(ids_, edges_, std::move(m1), std::move(m2));
    }

    void check_vertex(VertexIndex x) const {
        if (x >= ids_.size()) throw UnknownVertex("vertex index " + std::to_string(x) + " out of range");
    }
    void check_edge(EdgeIndex e) const {
        if (e >= edges_.size()) throw InputError("edge index " + std::to_string(e) + " out of range");
    }

private:
    void validate() const {
        const auto n = ids_.size();
        if (n < 2) throw InvalidGraph("graph needs at least two vertices");
        if (edges_.empty()) throw InvalidGraph("graph needs at least one edge");
        if (m1_.size() != n) throw InvalidGraph("vertex measure size does not match vertex count");
        if (m2_.size() != edges_.size()) throw InvalidGraph("edge measure size does not match edge count");
        std::map<std::string_view, int> seen_ids;
        for (const auto& id : ids_) {
            if (id.empty()) throw InvalidGraph("empty vertex identifier");
            if (seen_ids[id]++) throw InvalidGraph("duplicate vertex identifier '" + id + "'");
        }
        std::map<std::pair<VertexIndex, VertexIndex>, int> seen_edges;
        for (const auto& e : edges_) {
            if (e.u >= n || e.v >= n) throw InvalidGraph("edge endpoint out of range");
            if (e.u == e.v) throw InvalidGraph("self-loop at vertex '" + ids_[e.u] + "'");
            if (seen_edges[detail::key(e.u, e.v)]++) {
                throw InvalidGraph("parallel edge " + ids_[e.u] + "-" + ids_[e.v]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(m1_[i] > 0) || !std::isfinite(m1_[i])) {
                throw InvalidGraph("vertex measure must be positive at '" + ids_[i] + "'");
            }
        }
        for (std::size_t i = 0; i < m2_.size(); ++i) {
            if (!(m2_[i] > 0) || !std::isfinite(m2_[i])) {
                throw InvalidGraph("edge measure must be positive on " + ids_[edges_[i].u] + "-" +
                                   ids_[edges_[i].v]);
            }
        }
        if (!detail::connected(n, edges_)) throw InvalidGraph("graph is not connected");
    }

    std::vector<std::string> ids_;
    std::vector<Edge> edges_;
    std::vector<double> m1_;
    std::vector<double> m2_;
    std::vector<std::vector<EdgeIndex>> incident_;
    std::map<std::pair<VertexIndex, VertexIndex>, EdgeIndex> lookup_;
};

/// Positive edge weights ω, indexed like the edges of the graph they belong to.
class MetricAssignment {
public:
    explicit MetricAssignment(std::vector<double> weights) : w_(std::move(weights)) {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            if (!(w_[i] > 0) || !std::isfinite(w_[i])) {
                throw InputError("edge weight " + std::to_string(i) + " must be positive and finite");
            }
        }
    }

    static MetricAssignment constant(std::size_t n, double value = 1.0) {
        return MetricAssignment(std::vector<double>(n, value));
    }

    std::size_t size() const { return w_.size(); }
    double operator[](EdgeIndex e) const { return w_[e]; }
    std::span<const double> values() const { return w_; }

    MetricAssignment scaled(double c) const {
        auto w = w_;
        for (auto& x : w) x *= c;
        return MetricAssignment(std::move(w));
    }

    MetricAssignment without(EdgeIndex e) const {
        auto w = w_;
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(e));
        return MetricAssignment(std::move(w));
    }

private:
    std::vector<double> w_;
};

inline void check_aligned(const MeasuredGraph& g, const MetricAssignment& w) {
    if (w.size() != g.num_edges()) {
        throw InputError("metric has " + std::to_string(w.size()) + " weights but graph has " +
                         std::to_string(g.num_edges()) + " edges");
    }
}

struct SurgeryEvent {
    double time = 0;
    EdgeIndex removed_edge = 0;  // index in the graph before removal
    std::string edge_label;
    double edge_weight = 0;
    double alternative_distance = 0;
};

enum class GraphFamily { path, star, cycle, complete };
enum class MeasureMode { uniform, normalized_deg1 };

/// Vertex measure m1(x) = Σ_{y∼x} m2(x,y), i.e. Deg ≡ 1.
inline MeasuredGraph with_normalized_vertex_measure(const MeasuredGraph& g) {
    std::vector<double> m1(g.num_vertices(), 0.0);
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
        m1[g.edge(e).u] += g.m2(e);
        m1[g.edge(e).v] += g.m2(e);
    }
    auto m2 = std::vector<double>(g.edge_measure().begin(), g.edge_measure().end());
    return g.with_measures(std::move(m1), std::move(m2));
}

inline MeasuredGraph with_uniform_measure(const MeasuredGraph& g) {
    return g.with_measures(std::vector<double>(g.num_vertices(), 1.0),
                           std::vector<double>(g.num_edges(), 1.0));
}

/// Standard families with vertices labelled "1".."N".
///
/// For path and star `n` is the number of edges; for cycle and complete it is
/// the number of vertices. The star centre is vertex "1". In normalized mode
/// `m2_values` supplies one edge measure per edge, in edge order.
inline MeasuredGraph build_named_graph(GraphFamily family, std::size_t n, MeasureMode mode,
                                       std::span<const double> m2_values = {}) {
    std::size_t nv = 0;
    std::vector<Edge> edges;
    switch (family) {
        case GraphFamily::path:
            if (n < 1) throw InputError("path needs at least one edge");
            nv = n + 1;
            for (std::size_t i = 0; i < n; ++i) edges.push_back({i, i + 1});
            break;
        case GraphFamily::star:
            if (n < 1) throw InputError("star needs at least one edge");
            nv = n + 1;
            for (std::size_t i = 1; i <= n; ++i) edges.push_back({0, i});
            break;
        case GraphFamily::cycle:
            if (n < 3) throw InputError("cycle needs at least three vertices");
            nv = n;
            for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
            break;
        case GraphFamily::complete:
            if (n < 3) throw InputError("complete graph needs at least three vertices");
            nv = n;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j});
            break;
    }
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= nv; ++i) ids.push_back(std::to_string(i));

    if (mode == MeasureMode::uniform) {
        return MeasuredGraph(std::move(ids), std::move(edges), std::vector<double>(nv, 1.0),
                             std::vector<double>(edges.size(), 1.0));
    }
    if (m2_values.size() != edges.size()) {
        throw InputError("normalized measure needs " + std::to_string(edges.size()) +
                         " edge measures, got " + std::to_string(m2_values.size()));
    }
    std::vector<double> m2(m2_values.begin(), m2_values.end());
    std::vector<double> m1(nv, 0.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!(m2[i] > 0)) throw InputError("edge measures must be positive");
        m1[edges[i].u] += m2[i];
        m1[edges[i].v] += m2[i];
    }
    return MeasuredGraph(std::move(ids), std::move(edges), std::move(m1), std::move(m2));
}

/// Deg(x) = Σ_{y∼x} m2(x,y) / m1(x).
inline double deg_measure(const MeasuredGraph& g, VertexIndex x) {
    double s = 0;
    for (auto e : g.incident(x)) s += g.m2(e);
    return s / g.m1(x);
}

inline double max_deg_measure(const MeasuredGraph& g) {
    double best = 0;
    for (VertexIndex x = 0; x < g.num_vertices(); ++x) best = std::max(best, deg_measure(g, x));
    return best;
}

/// Single-source ω-weighted distances, optionally ignoring one edge.
inline std::vector<double> distances_from(const MeasuredGraph& g, const MetricAssignment& w,
                                          VertexIndex source,
                                          std::optional<EdgeIndex> excluded = std::nullopt) {
    check_aligned(g, w);
    g.check_vertex(source);
    std::vector<double> dist(g.num_vertices(), kUnreachable);
    using Item = std::pair<double, VertexIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d > dist[x]) continue;
        for (auto e : g.incident(x)) {
            if (excluded && *excluded == e) continue;
            auto y = g.edge(e).other(x);
            double nd = d + w[e];
            if (nd < dist[y]) {
                dist[y] = nd;
                heap.emplace(nd, y);
            }
        }
    }
    return dist;
}

/// Path distance d_ω(u,v); kUnreachable if `excluded` cuts u from v.
inline double shortest_distance(const MeasuredGraph& g, const MetricAssignment& w, VertexIndex u,
                                VertexIndex v, std::optional<EdgeIndex> excluded = std::nullopt) {
    g.check_vertex(v);
    if (u == v) {
        g.check_vertex(u);
        return 0.0;
    }
    return distances_from(g, w, u, excluded)[v];
}

/// Dense matrix of path distances (Floyd–Warshall; graphs here are small).
inline Eigen::MatrixXd all_pairs_distances(const MeasuredGraph& g, const MetricAssignment& w) {
    check_aligned(g, w);
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kUnreachable);
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0;
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
        auto a = static_cast<Eigen::Index>(g.edge(e).u);
        auto b = static_cast<Eigen::Index>(g.edge(e).v);
        d(a, b) = d(b, a) = std::min(d(a, b), w[e]);
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
    return d;
}

/// Length of the shortest path between the endpoints of `e` that avoids `e`.
inline double detour_length(const MeasuredGraph& g, const MetricAssignment& w, EdgeIndex e) {
    const auto& ed = g.edge(e);
    return shortest_distance(g, w, ed.u, ed.v, e);
}

/// Edges that are not the strict unique shortest path between their endpoints.
inline std::vector<EdgeIndex> surgery_scan(const MeasuredGraph& g, const MetricAssignment& w) {
    check_aligned(g, w);
    std::vector<EdgeIndex> bad;
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
        if (w[e] >= detour_length(g, w, e) - kSurgeryTolerance) bad.push_back(e);
    }
    return bad;
}

struct SurgeryResult {
    MeasuredGraph graph;
    MetricAssignment metric;
    std::vector<SurgeryEvent> events;
};

/// Removes violating edges one at a time, lowest index first, rescanning
/// after every removal.
inline SurgeryResult apply_surgery(const MeasuredGraph& g, const MetricAssignment& w, double time) {
    SurgeryResult out{g, w, {}};
    for (;;) {
        auto bad = surgery_scan(out.graph, out.metric);
        if (bad.empty()) return out;
        const auto e = bad.front();
        SurgeryEvent ev{time, e, out.graph.edge_label(e), out.metric[e],
                        detour_length(out.graph, out.metric, e)};
        auto reduced = out.graph.without_edge(e);
        out.metric = out.metric.without(e);
        out.graph = std::move(reduced);
        out.events.push_back(std::move(ev));
    }
}

/// B(i,j) = 1 iff edges i ≠ j share an endpoint.
inline Eigen::MatrixXd line_graph_adjacency(const MeasuredGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_edges());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (VertexIndex x = 0; x < g.num_vertices(); ++x) {
        auto inc = g.incident(x);
        for (std::size_t i = 0; i < inc.size(); ++i)
            for (std::size_t j = i + 1; j < inc.size(); ++j) {
                auto a = static_cast<Eigen::Index>(inc[i]);
                auto c = static_cast<Eigen::Index>(inc[j]);
                b(a, c) = b(c, a) = 1.0;
            }
    }
    return b;
}

inline bool is_tree(const MeasuredGraph& g) { return g.num_edges() + 1 == g.num_vertices(); }

}  // namespace ricci
