#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ricci/ricci.hpp"
#include "support/generators.hpp"

using namespace ricci;
using namespace ricci::testing;

namespace {

/// Outcome of one criterion: whether it held and the worst observed value.
struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char* pattern, double value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, value);
    return buf;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& a) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

double top_eigenvalue(const Eigen::MatrixXd& a) {
    auto ev = sorted_eigenvalues(a);
    return ev(ev.size() - 1);
}

/// Uniform-measure tree from an edge list.
MeasuredGraph uniform_tree(const std::vector<Edge>& edges) { return uniform_graph(edges.size() + 1, edges); }

/// A degree-3 vertex with a neighbour that starts a pendant chain of at
/// least two edges (interior vertices of degree 2, ending in a leaf).
bool has_paw(const MeasuredGraph& g) {
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (g.degree(v) != 3) continue;
        for (auto e0 : g.incident(v)) {
            VertexIndex prev = v;
            VertexIndex cur = g.edge(e0).other(v);
            std::size_t length = 1;
            while (g.degree(cur) == 2) {
                auto next_edge = g.incident(cur)[0];
                if (g.edge(next_edge).other(cur) == prev) next_edge = g.incident(cur)[1];
                prev = cur;
                cur = g.edge(next_edge).other(cur);
                ++length;
            }
            if (g.degree(cur) == 1 && length >= 2) return true;
        }
    }
    return false;
}

Outcome path_law() {
    Outcome out;
    double worst = 0;
    for (std::size_t n = 1; n <= 50; ++n) {
        auto g = build_named_graph(GraphFamily::path, n, MeasureMode::uniform);
        auto r = classify_convergence(g, MetricAssignment::constant(n));
        const double expected = 2.0 * (1.0 - std::cos(std::numbers::pi / static_cast<double>(n + 1)));
        worst = std::max(worst, std::abs(r.limiting_curvature - expected));
    }
    out.ok = worst < 1e-9;
    out.detail = fmt("max error %.3g", worst);
    return out;
}

Outcome star_law() {
    Outcome out;
    double worst = 0;
    for (std::size_t n = 2; n <= 20; ++n) {
        auto g = build_named_graph(GraphFamily::star, n, MeasureMode::uniform);
        const double lmax = eigendecompose(build_flow_matrix(g)).lambda_max();
        worst = std::max(worst, std::abs(lmax - (static_cast<double>(n) - 3.0)));
    }
    Rng rng(2);
    auto k13 = build_named_graph(GraphFamily::star, 3, MeasureMode::uniform);
    double worst_limit = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto w0 = random_values(rng, 3, 0.1, 5.0);
        const double mean = (w0[0] + w0[1] + w0[2]) / 3.0;
        const double horizon = long_time_horizon(eigendecompose(build_flow_matrix(k13)));
        const std::vector<double> times{horizon};
        auto traj = forman_flow_exact(k13, MetricAssignment(w0), times);
        for (EdgeIndex e = 0; e < 3; ++e)
            worst_limit = std::max(worst_limit, std::abs(traj.samples.back().omega(e) - mean));
    }
    out.ok = worst < 1e-9 && worst_limit < 1e-6;
    out.detail = fmt("max |lambda_max - (n-3)| %.3g", worst) + fmt(", max K13 limit error %.3g", worst_limit);
    return out;
}

Outcome tree_trichotomy() {
    Outcome out;
    std::size_t count = 0;
    std::size_t mismatches = 0;
    for (const auto& edges : all_trees(9)) {
        auto g = uniform_tree(edges);
        const auto tree_case = classify_tree_uniform(g);
        const auto report = classify_convergence(g, MetricAssignment::constant(g.num_edges()));
        const double oracle = top_eigenvalue(line_graph_adjacency(g)) - 2.0;
        Convergence expected = Convergence::divergent;
        if (tree_case == TreeCase::path_case) expected = Convergence::vanishing;
        if (tree_case == TreeCase::k13_case) expected = Convergence::constant_metric;
        Convergence by_sign = Convergence::constant_metric;
        if (oracle < -1e-9) by_sign = Convergence::vanishing;
        if (oracle > 1e-9) by_sign = Convergence::divergent;
        if (report.classification != expected || by_sign != expected) ++mismatches;
        ++count;
    }
    out.ok = mismatches == 0 && count == 1 + 1 + 2 + 3 + 6 + 11 + 23 + 47 + 106;
    out.detail = std::to_string(count) + " trees, " + std::to_string(mismatches) + " disagreements";
    return out;
}

Outcome paw_bound() {
    Outcome out;
    Rng rng(4);
    std::size_t found = 0;
    double smallest = std::numeric_limits<double>::infinity();
    while (found < 200) {
        auto edges = random_tree_edges(rng, pick(rng, 4, 14));
        auto t = uniform_tree(edges);
        if (!has_paw(t)) continue;
        ++found;
        smallest = std::min(smallest, top_eigenvalue(line_graph_adjacency(t)));
    }
    out.ok = smallest > 2.17;
    out.detail = std::to_string(found) + fmt(" trees, smallest lambda_max(B) %.6f", smallest);
    return out;
}

Outcome tree_equality() {
    Outcome out;
    Rng rng(5);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto g = random_tree(rng, pick(rng, 1, 12), 0.2, 3.0);
        MetricAssignment w(random_values(rng, g.num_edges(), 0.2, 3.0));
        for (EdgeIndex e = 0; e < g.num_edges(); ++e)
            worst = std::max(worst, std::abs(lly_edge(g, w, e) - forman_edge(g, w, e)));
    }
    out.ok = worst < 1e-8;
    out.detail = fmt("max |lly - forman| %.3g", worst);
    return out;
}

Outcome domination_and_oracle() {
    Outcome out;
    Rng rng(6);
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_oracle = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto nv = pick(rng, 3, 10);
        auto g = random_connected(rng, nv, pick(rng, 1, nv));
        auto w = non_degenerate_metric(rng, g.num_edges());
        const double eps = default_oracle_epsilon(g);
        for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
            const double lly = lly_edge(g, w, e);
            worst_gap = std::min(worst_gap, lly - forman_edge(g, w, e));
            worst_oracle = std::max(worst_oracle, std::abs(lly - lly_limit_estimate(g, w, e, eps)));
        }
    }
    out.ok = worst_gap >= -1e-8 && worst_oracle < 1e-6;
    out.detail = fmt("min lly - forman %.3g", worst_gap) + fmt(", max |lly - estimate| %.3g", worst_oracle);
    return out;
}

Outcome exact_vs_numerical() {
    Outcome out;
    Rng rng(7);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_tree(rng, pick(rng, 1, 6), 0.5, 1.5);
        MetricAssignment w0(random_values(rng, g.num_edges(), 0.5, 1.5));
        auto num = lly_flow_integrate(g, w0, 5.0, 1e-3, false);
        auto exact = forman_flow_exact(g, w0, time_grid(5.0, 1e-3));
        if (num.samples.size() != exact.samples.size()) {
            out.ok = false;
            out.detail = "sample grids differ";
            return out;
        }
        for (std::size_t k = 0; k < num.samples.size(); ++k)
            for (EdgeIndex e = 0; e < g.num_edges(); ++e)
                worst = std::max(worst, std::abs(num.samples[k].omega(e) - exact.samples[k].omega(e)));
    }
    out.ok = worst < 1e-6;
    out.detail = fmt("sup-norm difference %.3g", worst);
    return out;
}

Outcome long_time_limits() {
    Outcome out;
    Rng rng(8);
    double worst_kappa = 0;
    double worst_metric = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto nv = pick(rng, 2, 9);
        auto g = random_connected(rng, nv, pick(rng, 0, nv));
        MetricAssignment w0(random_values(rng, g.num_edges(), 0.5, 2.0));
        const auto fm = build_flow_matrix(g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.Ftilde);
        const auto n = fm.size();
        const double lmax = es.eigenvalues()(n - 1);
        Eigen::VectorXd p = es.eigenvectors().col(n - 1).cwiseAbs().cwiseQuotient(fm.sqrt_m2);
        p /= p.sum();
        const std::vector<double> times{long_time_horizon(eigendecompose(fm))};
        const auto traj = forman_flow_exact(g, w0, times);
        const auto& last = traj.samples.back();
        const auto normalized = last.normalized();
        for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
            worst_kappa = std::max(worst_kappa, std::abs(last.kappa[e] + lmax));
            worst_metric = std::max(worst_metric, std::abs(normalized[e] - p(static_cast<Eigen::Index>(e))));
        }
    }
    out.ok = worst_kappa < 1e-6 && worst_metric < 1e-6;
    out.detail = fmt("max |kappa + lambda_max| %.3g", worst_kappa) + fmt(", max metric error %.3g", worst_metric);
    return out;
}

Outcome initial_condition_independence() {
    Outcome out;
    Rng rng(9);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto nv = pick(rng, 2, 9);
        auto g = random_connected(rng, nv, pick(rng, 0, nv));
        const std::vector<double> times{long_time_horizon(eigendecompose(build_flow_matrix(g)))};
        auto a = forman_flow_exact(g, MetricAssignment(random_values(rng, g.num_edges(), 0.1, 10.0)), times);
        auto b = forman_flow_exact(g, MetricAssignment(random_values(rng, g.num_edges(), 0.1, 10.0)), times);
        const auto na = a.samples.back().normalized();
        const auto nb = b.samples.back().normalized();
        for (EdgeIndex e = 0; e < g.num_edges(); ++e) worst = std::max(worst, std::abs(na[e] - nb[e]));
    }
    out.ok = worst < 1e-8;
    out.detail = fmt("max normalized difference %.3g", worst);
    return out;
}

Outcome figure2_symmetry() {
    Outcome out;
    double worst_pair = 0;
    double worst_kappa_spread = 0;
    double largest_kappa = -std::numeric_limits<double>::infinity();
    for (const auto& run : reproduce(Figure::fig2)) {
        const auto& g = run.graph;
        const auto& last = run.trajectory.samples.back();
        const auto w = last.normalized();
        auto vertex = [&](const std::string& id) {
            const auto& ids = g.vertex_ids();
            return static_cast<VertexIndex>(std::find(ids.begin(), ids.end(), id) - ids.begin());
        };
        auto edge = [&](const char* a, const char* b) { return *g.find_edge(vertex(a), vertex(b)); };
        worst_pair = std::max(worst_pair, std::abs(w[edge("1", "5")] - w[edge("2", "5")]));
        worst_pair = std::max(worst_pair, std::abs(w[edge("6", "7")] - w[edge("6", "8")]));
        for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
            worst_kappa_spread = std::max(worst_kappa_spread, std::abs(last.kappa[e] - last.kappa[0]));
            largest_kappa = std::max(largest_kappa, last.kappa[e]);
        }
    }
    out.ok = worst_pair < 1e-6 && worst_kappa_spread < 1e-6 && largest_kappa < 0;
    out.detail = fmt("max pair difference %.3g", worst_pair) + fmt(", curvature spread %.3g", worst_kappa_spread) +
                 fmt(", curvature %.6f", largest_kappa);
    return out;
}

Outcome degree_one_examples() {
    Outcome out;
    Rng rng(11);
    double largest = -std::numeric_limits<double>::infinity();
    std::size_t cholesky_failures = 0;
    for (auto family : {GraphFamily::path, GraphFamily::star}) {
        for (std::size_t n = 1; n <= 30; ++n) {
            const auto a = random_values(rng, n, 0.1, 10.0);
            auto g = build_named_graph(family, n, MeasureMode::normalized_deg1, a);
            const auto fm = build_flow_matrix(g);
            largest = std::max(largest, eigendecompose(fm).lambda_max());
            Eigen::LLT<Eigen::MatrixXd> llt(-fm.Ftilde);
            if (llt.info() != Eigen::Success) ++cholesky_failures;
        }
    }
    out.ok = largest < 0 && cholesky_failures == 0;
    out.detail = fmt("largest lambda_max %.6g", largest) + ", " + std::to_string(cholesky_failures) +
                 " failed factorizations of -Ftilde";
    return out;
}

Outcome inverse_round_trip() {
    Outcome out;
    Rng rng(12);
    double worst_kappa = 0;
    double worst_lambda = 0;
    bool all_exist = true;
    for (int trial = 0; trial < 50; ++trial) {
        auto g = random_tree(rng, pick(rng, 1, 12));
        MetricAssignment w(random_values(rng, g.num_edges(), 0.2, 3.0));
        const auto target = forman_curvature(g, w).values;
        auto inv = inverse_curvature(g, target);
        worst_lambda = std::max(worst_lambda, std::abs(inv.lambda_max));
        if (!inv.metric) {
            all_exist = false;
            continue;
        }
        const auto achieved = forman_curvature(g, *inv.metric).values;
        for (EdgeIndex e = 0; e < g.num_edges(); ++e)
            worst_kappa = std::max(worst_kappa, std::abs(achieved[e] - target[e]));
    }
    out.ok = all_exist && worst_kappa < 1e-7 && worst_lambda < 1e-9;
    out.detail = fmt("max curvature error %.3g", worst_kappa) + fmt(", max |lambda_max(K)| %.3g", worst_lambda);
    return out;
}

Outcome perron_positivity() {
    Outcome out;
    Rng rng(13);
    double smallest_gap = std::numeric_limits<double>::infinity();
    double smallest_entry = std::numeric_limits<double>::infinity();
    double smallest_weight = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        const auto nv = pick(rng, 2, 10);
        auto g = random_connected(rng, nv, pick(rng, 0, 2 * nv));
        const auto fm = build_flow_matrix(g);
        const auto sd = eigendecompose(fm);
        const auto ev = sorted_eigenvalues(fm.Ftilde);
        const auto n = ev.size();
        if (n >= 2) smallest_gap = std::min(smallest_gap, ev(n - 1) - ev(n - 2));
        smallest_entry = std::min(smallest_entry, sd.perron().minCoeff());
        const auto w0 = random_values(rng, g.num_edges(), 0.1, 5.0);
        const Eigen::Map<const Eigen::VectorXd> omega0(w0.data(), static_cast<Eigen::Index>(w0.size()));
        const std::vector<double> times{0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
        auto traj = forman_flow_exact(g, MetricAssignment(w0), times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Eigen::VectorXd oracle = (fm.F * times[k]).exp() * omega0;
            const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
            smallest_weight = std::min(smallest_weight, oracle.minCoeff() / scale);
            for (EdgeIndex e = 0; e < g.num_edges(); ++e)
                smallest_weight = std::min(smallest_weight, traj.samples[k].omega(e) / scale);
        }
    }
    out.ok = smallest_gap > kSimplicityGap && smallest_entry > 0 && smallest_weight > 0;
    out.detail = fmt("smallest gap %.3g", smallest_gap) + fmt(", smallest Perron entry %.3g", smallest_entry) +
                 fmt(", smallest relative weight %.3g", smallest_weight);
    return out;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "path eigenvalue law", 1, path_law},
        {2, "star law and K13 limit", 1, star_law},
        {3, "tree trichotomy over all trees with <= 9 edges", 30, tree_trichotomy},
        {4, "paw bound lambda_max(B) > 2.17", 10, paw_bound},
        {5, "lly equals forman on trees", 30, tree_equality},
        {6, "lly dominates forman and matches transport estimate", 120, domination_and_oracle},
        {7, "exact flow matches numerical flow on trees", 120, exact_vs_numerical},
        {8, "long-time curvature and metric limits", 60, long_time_limits},
        {9, "limit independent of initial metric", 10, initial_condition_independence},
        {10, "figure 2 symmetry", 30, figure2_symmetry},
        {11, "degree-one paths and stars are negative definite", 5, degree_one_examples},
        {12, "inverse curvature round trip", 10, inverse_round_trip},
        {13, "perron vector and positivity", 30, perron_positivity},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool pass = o.ok && in_time;
        if (!pass) ++failures;
        std::printf("%s criterion %2d: %s (%s; %.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), seconds, c.budget_seconds);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
