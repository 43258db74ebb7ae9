#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ricci/export.hpp"
#include "ricci/flow.hpp"
#include "ricci/graph.hpp"
#include "ricci/spectral.hpp"

namespace ricci {

/// JSON value for a double: rounded to 12 digits, non-finite as a string.
inline nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return round12(x);
    return format_number(x);
}

inline nlohmann::json json_numbers(const std::vector<double>& xs) {
    auto out = nlohmann::json::array();
    for (double x : xs) out.push_back(json_number(x));
    return out;
}

/// Per-edge object keyed by edge label.
inline nlohmann::json json_by_edge(const MeasuredGraph& g, const std::vector<double>& xs) {
    nlohmann::json out = nlohmann::json::object();
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) out[g.edge_label(e)] = json_number(xs[e]);
    return out;
}

inline nlohmann::json graph_json(const MeasuredGraph& g) {
    nlohmann::json j;
    j["vertices"] = g.vertex_ids();
    auto edges = nlohmann::json::array();
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) edges.push_back(g.edge_label(e));
    j["edges"] = edges;
    j["m1"] = json_numbers({g.vertex_measure().begin(), g.vertex_measure().end()});
    j["m2"] = json_numbers({g.edge_measure().begin(), g.edge_measure().end()});
    return j;
}

inline nlohmann::json report_json(const MeasuredGraph& g, const ConvergenceReport& r) {
    nlohmann::json j;
    j["classification"] = to_string(r.classification);
    j["lambda_max"] = json_number(r.lambda_max);
    j["limiting_curvature"] = json_number(r.limiting_curvature);
    j["limiting_normalized_metric"] = json_by_edge(g, r.limiting_normalized_metric);
    if (r.classification == Convergence::constant_metric) {
        j["limiting_weights"] = json_by_edge(g, r.leading_coefficients);
    }
    j["bounds"] = {{"lower", json_number(r.bounds.lower)}, {"upper", json_number(r.bounds.upper)}};
    j["spectral_gap"] = json_number(r.spectral_gap);
    return j;
}

/// CSV with header `t,edge_id,omega,omega_normalized,kappa`.
inline std::string trajectory_csv(const FlowTrajectory& traj) {
    std::ostringstream out;
    out << "t,edge_id,omega,omega_normalized,kappa\n";
    for (const auto& s : traj.samples) {
        const auto& g = traj.graph_of(s);
        const auto norm = s.normalized();
        for (EdgeIndex e = 0; e < s.weights.size(); ++e) {
            out << format_number(s.t) << ',' << g.edge_label(e) << ',' << format_number(s.omega(e)) << ','
                << format_number(norm[e]) << ',' << format_number(s.kappa[e]) << '\n';
        }
    }
    return out.str();
}

/// CSV with header `t,edge_id,omega,alt_distance`.
inline std::string surgery_csv(const FlowTrajectory& traj) {
    std::ostringstream out;
    out << "t,edge_id,omega,alt_distance\n";
    for (const auto& ev : traj.surgeries) {
        out << format_number(ev.time) << ',' << ev.edge_label << ',' << format_number(ev.edge_weight) << ','
            << format_number(ev.alternative_distance) << '\n';
    }
    return out.str();
}

}  // namespace ricci
