#pragma once

// Line-oriented graph files:
//
//   # comment
//   graph <num_vertices> <num_edges>
//   vertex <id> <m1>
//   edge <id_u> <id_v> <m2> [<omega0>]
//
// Edge order in the file fixes edge indices.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/export.hpp"
#include "ricci/graph.hpp"

namespace ricci {

struct GraphFile {
    MeasuredGraph graph;
    std::optional<MetricAssignment> omega0;  // present iff every edge line carries one
};

namespace detail {

inline double parse_number(const std::string& tok, std::size_t line, const char* what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
    }
    return v;
}

inline std::size_t parse_count(const std::string& tok, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("line " + std::to_string(line) + ": bad count '" + tok + "'");
    }
    return v;
}

}  // namespace detail

inline GraphFile read_graph(std::istream& in) {
    std::optional<std::pair<std::size_t, std::size_t>> header;
    std::vector<std::string> ids;
    std::map<std::string, VertexIndex> index;
    std::vector<double> m1;
    std::vector<Edge> edges;
    std::vector<double> m2;
    std::vector<double> omega;
    std::size_t with_omega = 0;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const auto where = "line " + std::to_string(lineno) + ": ";

        if (tok[0] == "graph") {
            if (header) throw ParseError(where + "duplicate graph header");
            if (tok.size() != 3) throw ParseError(where + "expected 'graph <num_vertices> <num_edges>'");
            header = std::pair{detail::parse_count(tok[1], lineno), detail::parse_count(tok[2], lineno)};
        } else if (!header) {
            throw ParseError(where + "expected graph header before '" + tok[0] + "'");
        } else if (tok[0] == "vertex") {
            if (tok.size() != 3) throw ParseError(where + "expected 'vertex <id> <m1>'");
            if (index.count(tok[1])) throw ParseError(where + "duplicate vertex '" + tok[1] + "'");
            index[tok[1]] = ids.size();
            ids.push_back(tok[1]);
            m1.push_back(detail::parse_number(tok[2], lineno, "vertex measure"));
        } else if (tok[0] == "edge") {
            if (tok.size() != 4 && tok.size() != 5) {
                throw ParseError(where + "expected 'edge <id_u> <id_v> <m2> [<omega0>]'");
            }
            auto u = index.find(tok[1]);
            auto v = index.find(tok[2]);
            if (u == index.end() || v == index.end()) {
                throw ParseError(where + "edge refers to undeclared vertex");
            }
            edges.push_back({u->second, v->second});
            m2.push_back(detail::parse_number(tok[3], lineno, "edge measure"));
            if (tok.size() == 5) {
                omega.push_back(detail::parse_number(tok[4], lineno, "edge weight"));
                ++with_omega;
            }
        } else {
            throw ParseError(where + "unknown record '" + tok[0] + "'");
        }
    }
    if (!header) throw ParseError("missing 'graph <num_vertices> <num_edges>' header");
    if (ids.size() != header->first) {
        throw ParseError("header declares " + std::to_string(header->first) + " vertices, found " +
                         std::to_string(ids.size()));
    }
    if (edges.size() != header->second) {
        throw ParseError("header declares " + std::to_string(header->second) + " edges, found " +
                         std::to_string(edges.size()));
    }
    if (with_omega != 0 && with_omega != edges.size()) {
        throw ParseError("either every edge or no edge must carry an initial weight");
    }
    GraphFile out{MeasuredGraph(std::move(ids), std::move(edges), std::move(m1), std::move(m2)), std::nullopt};
    if (with_omega) out.omega0 = MetricAssignment(std::move(omega));
    return out;
}

inline GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file '" + path + "'");
    return read_graph(in);
}

inline void write_graph(std::ostream& out, const MeasuredGraph& g, const MetricAssignment* omega0 = nullptr) {
    out << "graph " << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (VertexIndex x = 0; x < g.num_vertices(); ++x)
        out << "vertex " << g.vertex_id(x) << ' ' << format_number(g.m1(x)) << '\n';
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        out << "edge " << g.vertex_id(ed.u) << ' ' << g.vertex_id(ed.v) << ' ' << format_number(g.m2(e));
        if (omega0) out << ' ' << format_number((*omega0)[e]);
        out << '\n';
    }
}

}  // namespace ricci
