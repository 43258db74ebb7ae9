#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ricci/ricci.hpp"

namespace fs = std::filesystem;
using namespace ricci;

namespace {

struct InputOptions {
    std::string input;
    std::string named;
    std::string measure = "uniform";
    std::vector<double> m2;
    std::vector<double> omega0;
};

struct Loaded {
    std::string name;
    MeasuredGraph graph;
    MetricAssignment omega0;
};

GraphFamily parse_family(const std::string& s) {
    if (s == "path") return GraphFamily::path;
    if (s == "star") return GraphFamily::star;
    if (s == "cycle") return GraphFamily::cycle;
    if (s == "complete") return GraphFamily::complete;
    throw InputError("unknown graph family '" + s + "' (expected path, star, cycle or complete)");
}

Loaded load(const InputOptions& in) {
    if (in.input.empty() == in.named.empty()) throw InputError("give exactly one of --input and --named");
    if (in.measure != "uniform" && in.measure != "normalized") {
        throw InputError("--measure must be 'uniform' or 'normalized'");
    }
    const bool normalized = in.measure == "normalized";
    std::optional<MetricAssignment> w0;
    std::string name;
    std::optional<MeasuredGraph> g;

    if (!in.input.empty()) {
        auto file = read_graph_file(in.input);
        g = std::move(file.graph);
        w0 = std::move(file.omega0);
        name = fs::path(in.input).stem().string();
        if (!in.m2.empty()) {
            if (in.m2.size() != g->num_edges()) throw InputError("--m2 needs one value per edge");
            g = g->with_measures({g->vertex_measure().begin(), g->vertex_measure().end()}, in.m2);
        }
        if (normalized) g = with_normalized_vertex_measure(*g);
    } else {
        const auto colon = in.named.find(':');
        if (colon == std::string::npos) throw InputError("--named expects family:n, e.g. star:3");
        const auto family = parse_family(in.named.substr(0, colon));
        std::size_t n = 0;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(in.named.substr(colon + 1), &used);
            if (used != in.named.size() - colon - 1 || v < 0) throw std::invalid_argument("n");
            n = static_cast<std::size_t>(v);
        } catch (const std::logic_error&) {
            throw InputError("bad size in --named '" + in.named + "'");
        }
        std::vector<double> m2 = in.m2;
        if (normalized && m2.empty()) {
            const auto probe = build_named_graph(family, n, MeasureMode::uniform);
            m2.assign(probe.num_edges(), 1.0);
        }
        if (!normalized && !m2.empty()) throw InputError("--m2 applies to --measure normalized or --input");
        g = build_named_graph(family, n, normalized ? MeasureMode::normalized_deg1 : MeasureMode::uniform, m2);
        name = in.named.substr(0, colon) + "_" + std::to_string(n);
    }
    if (normalized) name += "_normalized";
    if (!in.omega0.empty()) w0 = MetricAssignment(in.omega0);
    if (!w0) w0 = MetricAssignment::constant(g->num_edges());
    check_aligned(*g, *w0);
    return {std::move(name), std::move(*g), std::move(*w0)};
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.input, "graph file");
    cmd->add_option("--named", in.named, "named graph family:n (path, star, cycle, complete)");
    cmd->add_option("--measure", in.measure, "uniform or normalized (Deg = 1)");
    cmd->add_option("--m2", in.m2, "edge measures, comma separated")->delimiter(',');
    cmd->add_option("--omega0", in.omega0, "initial weights, comma separated")->delimiter(',');
}

double tol_zero_from(const std::optional<double>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("RICCI_TOL_ZERO")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v >= 0)) throw InputError("RICCI_TOL_ZERO must be a nonnegative number");
        return v;
    }
    return kDefaultTolZero;
}

fs::path output_path(const std::string& dir, const std::string& file) {
    fs::create_directories(dir);
    return fs::path(dir) / file;
}

void emit(const std::string& dir, const std::string& file, const std::string& content) {
    const auto path = output_path(dir, file);
    write_file_atomic(path, content);
    std::cout << path.string() << '\n';
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(json_numbers(r));
    }
    return rows;
}

void cmd_curvature(const InputOptions& in, std::optional<double> epsilon, const std::string& out) {
    auto l = load(in);
    const auto& g = l.graph;
    const double eps = epsilon ? *epsilon : default_oracle_epsilon(g);
    const auto forman = forman_curvature(g, l.omega0);
    const auto lly = lly_curvature(g, l.omega0);
    std::ostringstream csv;
    csv << "edge,forman,lly,lly_limit_estimate\n";
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
        csv << g.edge_label(e) << ',' << format_number(forman[e]) << ',' << format_number(lly[e]) << ','
            << format_number(lly_limit_estimate(g, l.omega0, e, eps)) << '\n';
    }
    emit(out, "curvature_" + l.name + ".csv", csv.str());
}

struct FlowOptions {
    std::string curvature = "forman";
    double t_end = 5.0;
    double dt = 1e-3;
    bool surgery = false;
    bool normalized = false;
};

void cmd_flow(const InputOptions& in, const FlowOptions& fo, const std::string& out) {
    auto l = load(in);
    FlowTrajectory traj;
    if (fo.curvature == "forman") {
        const auto times = time_grid(fo.t_end, fo.dt);
        traj = forman_flow_exact(l.graph, l.omega0, times);
    } else if (fo.curvature == "lly") {
        traj = lly_flow_integrate(l.graph, l.omega0, fo.t_end, fo.dt, fo.surgery);
    } else {
        throw InputError("--curvature must be 'forman' or 'lly'");
    }
    if (fo.normalized) traj = normalized_trajectory(std::move(traj));
    emit(out, "flow_" + l.name + ".csv", trajectory_csv(traj));
    if (fo.curvature == "lly") emit(out, "flow_" + l.name + "_surgery.csv", surgery_csv(traj));
}

void cmd_spectrum(const InputOptions& in, const std::string& out) {
    auto l = load(in);
    const auto fm = build_flow_matrix(l.graph);
    const auto sd = eigendecompose(fm);
    const auto c = flow_coefficients(sd, fm, l.omega0);
    nlohmann::json j;
    j["graph"] = graph_json(l.graph);
    j["omega0"] = json_numbers({l.omega0.values().begin(), l.omega0.values().end()});
    j["F"] = matrix_json(fm.F);
    j["Ftilde"] = matrix_json(fm.Ftilde);
    j["eigenvalues"] = json_numbers({sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size()});
    j["eigenvectors"] = matrix_json(sd.eigenvectors);
    j["coefficients"] = matrix_json(c);
    j["lambda_max"] = json_number(sd.lambda_max());
    j["spectral_gap"] = json_number(sd.spectral_gap());
    emit(out, "spectrum_" + l.name + ".json", dump(j));
}

void cmd_classify(const InputOptions& in, std::optional<double> tol, const std::string& out) {
    auto l = load(in);
    const auto report = classify_convergence(l.graph, l.omega0, tol_zero_from(tol));
    auto j = report_json(l.graph, report);
    j["graph"] = graph_json(l.graph);
    if (is_tree(l.graph) && has_uniform_measure(l.graph)) j["tree_case"] = to_string(classify_tree_uniform(l.graph));
    emit(out, "classify_" + l.name + ".json", dump(j));
}

void cmd_inverse(const InputOptions& in, const std::vector<double>& kappa, std::optional<double> tol,
                 const std::string& out) {
    auto l = load(in);
    const auto res = inverse_curvature(l.graph, kappa, tol ? *tol : 1e-9);
    nlohmann::json j;
    j["graph"] = graph_json(l.graph);
    j["target_curvature"] = json_by_edge(l.graph, kappa);
    j["lambda_max_K"] = json_number(res.lambda_max);
    j["exists"] = res.metric.has_value();
    if (res.metric) {
        const auto& m = *res.metric;
        j["metric"] = json_by_edge(l.graph, {m.values().begin(), m.values().end()});
        j["achieved_curvature"] = json_by_edge(l.graph, forman_curvature(l.graph, m).values);
    }
    emit(out, "inverse_" + l.name + ".json", dump(j));
}

void cmd_reproduce(const std::string& figure, const std::string& out) {
    for (const auto& run : reproduce(parse_figure(figure))) {
        emit(out, "reproduce_" + run.name + ".csv", trajectory_csv(run.trajectory));
        emit(out, "reproduce_" + run.name + ".json", dump(run.summary));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Ricci curvature and Ricci flow on measured weighted graphs"};
    app.require_subcommand(1);
    std::string out = ".";
    app.add_option("--out", out, "output directory")->capture_default_str();

    InputOptions in;
    std::optional<double> epsilon;
    std::optional<double> tol;
    FlowOptions fo;
    std::vector<double> kappa;
    std::string figure;

    auto* curv = app.add_subcommand("curvature", "per-edge Forman and Lin-Lu-Yau curvature");
    add_input_options(curv, in);
    curv->add_option("--epsilon", epsilon, "kernel laziness for the transport estimate");
    curv->add_option("--out", out, "output directory");

    auto* flow = app.add_subcommand("flow", "evolve the curvature flow");
    add_input_options(flow, in);
    flow->add_option("--curvature", fo.curvature, "forman (exact) or lly (RK4)");
    flow->add_option("--t-end", fo.t_end, "final time")->check(CLI::NonNegativeNumber);
    flow->add_option("--dt", fo.dt, "time step")->check(CLI::PositiveNumber);
    flow->add_flag("--surgery", fo.surgery, "remove edges that stop being unique shortest paths");
    flow->add_flag("--normalized", fo.normalized, "rescale every sample to total weight 1");
    flow->add_option("--out", out, "output directory");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "flow matrix and its eigendecomposition");
    add_input_options(spectrum_cmd, in);
    spectrum_cmd->add_option("--out", out, "output directory");

    auto* cls = app.add_subcommand("classify", "long-time behaviour of the Forman flow");
    add_input_options(cls, in);
    cls->add_option("--tol-zero", tol, "tolerance for the constant-metric class");
    cls->add_option("--out", out, "output directory");

    auto* inv = app.add_subcommand("inverse", "metric with prescribed Forman curvature");
    add_input_options(inv, in);
    inv->add_option("--kappa", kappa, "target curvature per edge, comma separated")->delimiter(',')->required();
    inv->add_option("--tol-zero", tol, "tolerance on the top eigenvalue");
    inv->add_option("--out", out, "output directory");

    auto* rep = app.add_subcommand("reproduce", "regenerate the example and figure data");
    rep->add_option("--figure", figure, "fig1a, fig1b, fig1c, fig1d, fig2, ex42 or ex43")->required();
    rep->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*curv) cmd_curvature(in, epsilon, out);
        if (*flow) cmd_flow(in, fo, out);
        if (*spectrum_cmd) cmd_spectrum(in, out);
        if (*cls) cmd_classify(in, tol, out);
        if (*inv) cmd_inverse(in, kappa, tol, out);
        if (*rep) cmd_reproduce(figure, out);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
