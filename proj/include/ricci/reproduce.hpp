#pragma once

// Canned runs for the star, tree and Deg ≡ 1 examples. On trees the
// Lin-Lu-Yau and Forman flows coincide, so the trajectories use the exact
// spectral solution.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ricci/flow.hpp"
#include "ricci/graph.hpp"
#include "ricci/report.hpp"
#include "ricci/spectral.hpp"

namespace ricci {

enum class Figure { fig1a, fig1b, fig1c, fig1d, fig2, ex42, ex43 };

inline const std::vector<std::pair<std::string_view, Figure>>& figure_names() {
    static const std::vector<std::pair<std::string_view, Figure>> names{
        {"fig1a", Figure::fig1a}, {"fig1b", Figure::fig1b}, {"fig1c", Figure::fig1c}, {"fig1d", Figure::fig1d},
        {"fig2", Figure::fig2},   {"ex42", Figure::ex42},   {"ex43", Figure::ex43}};
    return names;
}

inline Figure parse_figure(std::string_view name) {
    for (const auto& [n, f] : figure_names())
        if (n == name) return f;
    throw InputError("unknown figure id '" + std::string(name) + "'");
}

struct ReproductionRun {
    std::string name;
    MeasuredGraph graph;
    MetricAssignment omega0;
    ConvergenceReport report;
    FlowTrajectory trajectory;
    nlohmann::json summary;
};

inline constexpr std::size_t kReproductionSamples = 401;

/// The degree-4 tree with edges 1–5, 2–5, 3–4, 4–5, 5–6, 6–7, 6–8.
inline MeasuredGraph figure2_tree() {
    std::vector<std::string> ids;
    for (int i = 1; i <= 8; ++i) ids.push_back(std::to_string(i));
    std::vector<Edge> edges{{0, 4}, {1, 4}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {5, 7}};
    return MeasuredGraph(std::move(ids), std::move(edges), std::vector<double>(8, 1.0),
                         std::vector<double>(7, 1.0));
}

/// 1/7 ± δ, alternating sign along the edge order starting with +.
inline MetricAssignment figure2_initial_metric(double delta) {
    std::vector<double> w;
    for (int i = 0; i < 7; ++i) w.push_back(1.0 / 7.0 + (i % 2 == 0 ? delta : -delta));
    return MetricAssignment(std::move(w));
}

inline ReproductionRun run_recipe(std::string name, MeasuredGraph g, MetricAssignment w0, bool normalize) {
    auto report = classify_convergence(g, w0);
    const auto fm = build_flow_matrix(g);
    const auto sd = eigendecompose(fm);
    const double horizon = long_time_horizon(sd);
    std::vector<double> times;
    for (std::size_t k = 0; k < kReproductionSamples; ++k)
        times.push_back(horizon * static_cast<double>(k) / static_cast<double>(kReproductionSamples - 1));
    auto traj = forman_flow_exact(g, w0, times);
    if (normalize) traj = normalized_trajectory(std::move(traj));

    const auto& last = traj.samples.back();
    nlohmann::json summary;
    summary["run"] = name;
    summary["graph"] = graph_json(g);
    summary["omega0"] = json_numbers({w0.values().begin(), w0.values().end()});
    summary["normalized_flow"] = normalize;
    summary["horizon"] = json_number(horizon);
    summary["report"] = report_json(g, report);
    summary["final"] = {{"t", json_number(last.t)},
                        {"omega_normalized", json_by_edge(g, last.normalized())},
                        {"kappa", json_by_edge(g, last.kappa.values)}};
    return {std::move(name), std::move(g), std::move(w0), std::move(report), std::move(traj), std::move(summary)};
}

inline std::vector<ReproductionRun> reproduce(Figure fig) {
    std::vector<ReproductionRun> runs;
    auto ramp = [](std::size_t n) {
        std::vector<double> w;
        for (std::size_t i = 1; i <= n; ++i) w.push_back(static_cast<double>(i));
        return MetricAssignment(std::move(w));
    };
    switch (fig) {
        case Figure::fig1a:
            runs.push_back(run_recipe("fig1a", build_named_graph(GraphFamily::star, 3, MeasureMode::uniform), ramp(3),
                                      false));
            break;
        case Figure::fig1b: {
            const std::vector<double> m2{1, 2, 3};
            runs.push_back(run_recipe("fig1b", build_named_graph(GraphFamily::star, 3, MeasureMode::normalized_deg1, m2),
                                      MetricAssignment::constant(3), false));
            break;
        }
        case Figure::fig1c:
            runs.push_back(run_recipe("fig1c", build_named_graph(GraphFamily::star, 6, MeasureMode::uniform), ramp(6),
                                      false));
            break;
        case Figure::fig1d: {
            const std::vector<double> m2(6, 1.0);
            runs.push_back(run_recipe("fig1d", build_named_graph(GraphFamily::star, 6, MeasureMode::normalized_deg1, m2),
                                      MetricAssignment::constant(6), false));
            break;
        }
        case Figure::fig2:
            for (double delta : {0.0, 0.01, 0.02, 0.03}) {
                char name[32];
                std::snprintf(name, sizeof name, "fig2_delta%.2f", delta);
                runs.push_back(run_recipe(name, figure2_tree(), figure2_initial_metric(delta), true));
            }
            break;
        case Figure::ex42: {
            const std::vector<double> a{1, 2, 3, 4, 5};
            runs.push_back(run_recipe("ex42", build_named_graph(GraphFamily::path, 5, MeasureMode::normalized_deg1, a),
                                      MetricAssignment::constant(5), false));
            break;
        }
        case Figure::ex43: {
            const std::vector<double> a{1, 2, 3, 4};
            runs.push_back(run_recipe("ex43", build_named_graph(GraphFamily::star, 4, MeasureMode::normalized_deg1, a),
                                      MetricAssignment::constant(4), false));
            break;
        }
    }
    for (auto& r : runs) {
        const bool negative_definite = r.report.lambda_max < 0;
        r.summary["negative_definite"] = negative_definite;
    }
    return runs;
}

}  // namespace ricci
