#include "srlab/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srlab/catalog.hpp"
#include "srlab/diffusion.hpp"
#include "srlab/frenet.hpp"
#include "srlab/kappa.hpp"
#include "srlab/martinet.hpp"
#include "srlab/parallel.hpp"

namespace srlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(std::initializer_list<double> vals) {
        bool first = true;
        for (double v : vals) {
            if (!first) out_ << ",";
            out_ << fmt(v);
            first = false;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

json load_config(const RunRequest& req) {
    json j = json::object();
    if (!req.config_path.empty()) {
        std::ifstream in(req.config_path);
        if (!in) throw ConfigError("cannot read config file: " + req.config_path);
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    }
    for (const auto& [key, value] : req.overrides) {
        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded() || parsed.is_string())
            j[key] = value;
        else
            j[key] = parsed;
    }
    if (req.seed) j["seed"] = *req.seed;
    if (req.threads > 0) j["threads"] = req.threads;
    return j;
}

double get_num(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw ConfigError("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int dflt) {
    double v = get_num(j, key, dflt);
    if (v != static_cast<int>(v)) throw ConfigError("field '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::uint64_t require_seed(const json& j, const std::string& command) {
    if (!j.contains("seed"))
        throw ConfigError("'" + command + "' is stochastic: a seed is required (--seed or config)");
    return j.at("seed").get<std::uint64_t>();
}

Eigen::Vector3d get_vec3(const json& j, const std::string& key,
                         std::optional<Eigen::Vector3d> dflt = std::nullopt) {
    if (!j.contains(key)) {
        if (dflt) return *dflt;
        throw ConfigError("field '" + key + "' is required");
    }
    const json& v = j.at(key);
    if (v.is_string()) {
        Eigen::Vector3d r;
        std::istringstream ss(v.get<std::string>());
        char comma;
        if (!(ss >> r(0) >> comma >> r(1) >> comma >> r(2)))
            throw ConfigError("field '" + key + "': expected \"a,b,c\"");
        return r;
    }
    if (!v.is_array() || v.size() != 3)
        throw ConfigError("field '" + key + "' must be a 3-element array");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<Eigen::Vector3d> get_points(const json& j, const std::string& key,
                                        std::vector<Eigen::Vector3d> dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_array()) throw ConfigError("field '" + key + "' must be an array of points");
    std::vector<Eigen::Vector3d> pts;
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 3)
            throw ConfigError("field '" + key + "': each point must have 3 components");
        pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return pts;
}

ContactMetric get_structure(const json& j) {
    std::string name = j.value("structure", std::string("heisenberg-flat"));
    try {
        return catalog::by_name(name);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("field 'structure': ") + e.what());
    }
}

GridSpecPtr get_grid(const json& j) {
    GridSpec spec;
    spec.shape = {1, 1, 64};
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (g.contains("shape")) {
            const json& s = g.at("shape");
            if (!s.is_array() || s.size() != 3)
                throw ConfigError("grid.shape must have 3 entries");
            for (int a = 0; a < 3; ++a) {
                spec.shape[static_cast<std::size_t>(a)] = s[static_cast<std::size_t>(a)].get<int>();
                if (spec.shape[static_cast<std::size_t>(a)] < 1)
                    throw ConfigError("grid.shape entries must be >= 1");
            }
        }
        if (g.contains("length"))
            for (int a = 0; a < 3; ++a)
                spec.length[static_cast<std::size_t>(a)] = g.at("length")[static_cast<std::size_t>(a)].get<double>();
        if (g.contains("origin"))
            for (int a = 0; a < 3; ++a)
                spec.origin[static_cast<std::size_t>(a)] = g.at("origin")[static_cast<std::size_t>(a)].get<double>();
    }
    if (spec.shape[0] != 1)
        throw ConfigError("grid.shape[0] must be 1 (the grid chart is singleton along x1)");
    return std::make_shared<const GridSpec>(spec);
}

ScalarExpr get_expr(const json& j, const std::string& key, const std::string& dflt) {
    std::string text = j.value(key, dflt);
    try {
        return parse_expr(text, 3);
    } catch (const ParseError& e) {
        throw ConfigError("field '" + key + "': " + e.what());
    }
}

GridMetricField get_field(const json& j) {
    auto spec = get_grid(j);
    return GridMetricField::sample(spec, get_expr(j, "a11", "1 + 0.3*sin(x3)"),
                                   get_expr(j, "a12", "0"),
                                   get_expr(j, "a22", "1 / (1 + 0.3*sin(x3))"));
}

FrenetControls get_controls(const json& j) {
    int n = get_int(j, "n", 3);
    int m = get_int(j, "m", 1);
    if (n < 2 || m < 1) throw ConfigError("need n >= 2 and m >= 1");
    FrenetControls c = FrenetControls::circle(n, m);
    c.delta_floor = get_num(j, "delta_floor", c.delta_floor);
    if (!j.contains("controls")) return c;
    const json& arr = j.at("controls");
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(n - 1))
        throw ConfigError("field 'controls' must list u_1..u_" + std::to_string(n - 1));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& u = arr[i];
        FourierSeries& s = c.u[i];
        s.constant = u.value("constant", 0.0);
        s.cos_coef = u.value("cos", std::vector<double>{});
        s.sin_coef = u.value("sin", std::vector<double>{});
    }
    return c;
}

void write_field_csv(const std::filesystem::path& path, const GridMetricField& field) {
    CsvWriter csv(path, "x1,x2,x3,a11,a12,a22");
    for (int idx = 0; idx < field.spec->count(); ++idx) {
        Eigen::Vector3d x = field.spec->point(idx);
        csv.row({x(0), x(1), x(2), field.a11.values()(idx), field.a12.values()(idx),
                 field.a22.values()(idx)});
    }
}

void write_controls_csv(const std::filesystem::path& path, const FrenetControls& c) {
    std::ofstream out(path);
    out << "control,term,value\n";
    for (std::size_t i = 0; i < c.u.size(); ++i) {
        const FourierSeries& s = c.u[i];
        out << (i + 1) << ",constant," << fmt(s.constant) << "\n";
        for (std::size_t k = 0; k < s.cos_coef.size(); ++k)
            out << (i + 1) << ",cos" << (k + 1) << "," << fmt(s.cos_coef[k]) << "\n";
        for (std::size_t k = 0; k < s.sin_coef.size(); ++k)
            out << (i + 1) << ",sin" << (k + 1) << "," << fmt(s.sin_coef[k]) << "\n";
    }
}

json bvp_report_json(const BvpReport& rep) {
    json out;
    out["distance"] = rep.distance;
    out["multiplicity"] = rep.multiplicity;
    out["converged_restarts"] = rep.converged_restarts;
    json sols = json::array();
    for (const auto& s : rep.solutions) {
        sols.push_back({{"p0", {s.p0(0), s.p0(1), s.p0(2)}},
                        {"length", s.length},
                        {"terminal_error", s.terminal_error},
                        {"restart_index", s.restart_index}});
    }
    out["solutions"] = sols;
    return out;
}

BvpOptions get_bvp_options(const json& j, const std::string& command) {
    BvpOptions opts;
    opts.seed = require_seed(j, command);
    opts.restarts = get_int(j, "restarts", opts.restarts);
    opts.step = get_num(j, "step", opts.step);
    opts.max_duration = get_num(j, "max_duration", opts.max_duration);
    opts.lambda_scale = get_num(j, "lambda_scale", opts.lambda_scale);
    opts.threads = get_int(j, "threads", 0);
    return opts;
}

struct CommandResult {
    json report;
    std::vector<std::string> outputs;
};

using Handler = CommandResult (*)(const json&, const std::filesystem::path&);

CommandResult cmd_reeb(const json& cfg, const std::filesystem::path& out) {
    ContactMetric s = get_structure(cfg);
    auto pts = get_points(cfg, "points",
                          {{0.1, 0.2, 0.3}, {-0.2, 0.1, 0.4}, {0.3, -0.1, -0.2}, {0.0, 0.5, 0.1}});
    ReebField reeb = reeb_field(s.frame, s.A);
    SymbolicHamiltonian formula = reeb_lift_formula(s.frame, s.A);
    CsvWriter csv(out / "reeb.csv", "x1,x2,x3,e1,e2,e3");
    double max_rel = 0.0;
    for (const auto& q : pts) {
        Eigen::Vector3d e = reeb.e.eval(std::span<const double>(q.data(), 3));
        csv.row({q(0), q(1), q(2), e(0), e(1), e(2)});
        // compare the two lifts on a few fiber covectors
        for (int k = 0; k < 4; ++k) {
            std::array<double, 3> p{std::cos(0.7 * k), std::sin(0.7 * k), 0.5 * k - 1.0};
            double a = reeb.u_h.eval(std::span<const double>(q.data(), 3), p);
            double b = formula.eval(std::span<const double>(q.data(), 3), p);
            max_rel = std::max(max_rel, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    }
    json rep;
    rep["structure"] = s.name;
    rep["lift_formula_max_relative_disagreement"] = max_rel;
    return {rep, {"reeb.csv"}};
}

CommandResult cmd_diffuse(const json& cfg, const std::filesystem::path& out) {
    GridMetricField field = get_field(cfg);
    double eps = get_num(cfg, "epsilon", 0.3);
    int steps = get_int(cfg, "steps", 1);
    bool scaled = cfg.value("scaled", false);
    AveragingOptions opts;
    opts.threads = get_int(cfg, "threads", 0);
    json history = json::array();
    AveragingReport last;
    for (int s = 0; s < steps; ++s) {
        auto [next, rep] = scaled ? scaled_averaging_step(field, eps, std::nullopt, opts)
                                  : averaging_step(field, eps, opts);
        field = next;
        last = rep;
        history.push_back({{"sup_change", rep.sup_change},
                           {"det_drift_max", rep.det_drift_max},
                           {"scale_used", rep.scale_used}});
    }
    write_field_csv(out / "field.csv", field);
    json rep;
    rep["epsilon"] = eps;
    rep["steps"] = steps;
    rep["sup_change"] = last.sup_change;
    rep["det_drift_max"] = last.det_drift_max;
    rep["invariance_residual"] = invariance_residual(field);
    rep["history"] = history;
    return {rep, {"field.csv"}};
}

CommandResult cmd_heat(const json& cfg, const std::filesystem::path& out) {
    GridMetricField field = get_field(cfg);
    double c = get_num(cfg, "c", 1.0);
    double T = get_num(cfg, "T", 0.1);
    double dt = get_num(cfg, "dt", 0.004);
    if (T <= 0 || dt <= 0) throw ConfigError("T and dt must be positive");
    HeatOptions opts;
    opts.threads = get_int(cfg, "threads", 0);
    HeatResult res = evolve_heat(field, c, T, dt, opts);
    write_field_csv(out / "field.csv", res.field);
    json rep;
    rep["steps_taken"] = res.steps_taken;
    rep["halted_rank_drop"] = res.halted_rank_drop;
    rep["residual_history"] = res.residual_history;
    return {rep, {"field.csv"}};
}

CommandResult cmd_kappa(const json& cfg, const std::filesystem::path& out) {
    ContactMetric s = get_structure(cfg);
    auto pts = get_points(cfg, "points",
                          {{0.1, 0.2, 0.3}, {-0.2, 0.1, 0.4}, {0.3, -0.1, -0.2}, {0.0, 0.5, 0.1}});
    KappaOptions opts;
    opts.fd_step = get_num(cfg, "fd_step", opts.fd_step);
    CsvWriter csv(out / "kappa.csv", "x1,x2,x3,kappa");
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& q : pts) {
        double k = kappa_estimate(s.frame, s.A, q, opts);
        csv.row({q(0), q(1), q(2), k});
        mn = std::min(mn, k);
        mx = std::max(mx, k);
    }
    json rep;
    rep["structure"] = s.name;
    rep["min"] = mn;
    rep["max"] = mx;
    rep["spread"] = mx - mn;
    return {rep, {"kappa.csv"}};
}

CommandResult cmd_geodesic(const json& cfg, const std::filesystem::path& out) {
    ContactMetric s = get_structure(cfg);
    Eigen::Vector3d q0 = get_vec3(cfg, "q0", Eigen::Vector3d{0, 0, 0});
    Eigen::Vector3d q1 = get_vec3(cfg, "q1");
    BvpOptions opts = get_bvp_options(cfg, "geodesic");
    BvpReport rep = solve_geodesic_bvp(s.frame, s.A, q0, q1, opts);
    CsvWriter csv(out / "solutions.csv", "p1,p2,p3,length,terminal_error,restart_index");
    for (const auto& sol : rep.solutions)
        csv.row({sol.p0(0), sol.p0(1), sol.p0(2), sol.length, sol.terminal_error,
                 static_cast<double>(sol.restart_index)});
    json j = bvp_report_json(rep);
    j["structure"] = s.name;
    return {j, {"solutions.csv"}};
}

CommandResult cmd_martinet_surface(const json& cfg, const std::filesystem::path& out) {
    double halfwidth = get_num(cfg, "halfwidth", 0.5);
    int resolution = get_int(cfg, "resolution", 24);
    if (resolution < 2) throw ConfigError("resolution must be >= 2");
    auto pts = martinet_surface(MartinetStructure::flat().frame, halfwidth, resolution);
    CsvWriter csv(out / "surface.csv", "x1,x2,x3");
    for (const auto& p : pts) csv.row({p(0), p(1), p(2)});
    json rep;
    rep["points"] = pts.size();
    return {rep, {"surface.csv"}};
}

CommandResult cmd_martinet_cut(const json& cfg, const std::filesystem::path& out) {
    Eigen::Vector3d q1 = get_vec3(cfg, "q1", Eigen::Vector3d{0.0, 0.2, 0.01});
    BvpOptions opts = get_bvp_options(cfg, "martinet-cut");
    CutProbeReport rep = cut_locus_probe(q1, opts);
    CsvWriter csv(out / "solutions.csv", "p1,p2,p3,length,terminal_error,restart_index");
    for (const auto& sol : rep.bvp.solutions)
        csv.row({sol.p0(0), sol.p0(1), sol.p0(2), sol.length, sol.terminal_error,
                 static_cast<double>(sol.restart_index)});
    json j = bvp_report_json(rep.bvp);
    j["q1"] = {q1(0), q1(1), q1(2)};
    if (rep.singular_length) j["singular_length"] = *rep.singular_length;
    return {j, {"solutions.csv"}};
}

CommandResult cmd_martinet_sphere(const json& cfg, const std::filesystem::path& out) {
    double r = get_num(cfg, "r", 0.2);
    if (r <= 0) throw ConfigError("r must be positive");
    SphereOptions opts;
    opts.n_theta = get_int(cfg, "n_theta", opts.n_theta);
    opts.n_psi = get_int(cfg, "n_psi", opts.n_psi);
    opts.steps_per_shot = get_int(cfg, "steps_per_shot", opts.steps_per_shot);
    opts.threads = get_int(cfg, "threads", 0);
    SphereSampleSet set = sphere_sample(r, opts);
    CsvWriter csv(out / "samples.csv", "i_theta,i_psi,theta,psi,x1,x2,x3,minimal,locus");
    for (const auto& s : set.samples)
        csv.row({static_cast<double>(s.i_theta), static_cast<double>(s.i_psi), s.theta, s.psi,
                 s.endpoint(0), s.endpoint(1), s.endpoint(2), static_cast<double>(s.minimal),
                 static_cast<double>(s.locus)});
    CsvWriter poly(out / "polyline.csv", "x1,x2,x3");
    for (const auto& p : set.locus_polyline) poly.row({p(0), p(1), p(2)});
    json rep;
    rep["radius"] = set.radius;
    rep["smooth_components"] = set.smooth_components;
    rep["locus_loops"] = set.locus_loops;
    rep["polyline_nodes"] = set.locus_polyline.size();
    rep["resolution_ok"] = set.resolution_ok;
    rep["note"] = set.note;
    return {rep, {"samples.csv", "polyline.csv"}};
}

CommandResult cmd_frenet_integrate(const json& cfg, const std::filesystem::path& out) {
    FrenetControls c = get_controls(cfg);
    int steps = get_int(cfg, "steps_per_period", 512);
    FrenetTrajectory tr = integrate_frenet(c, steps);
    std::ofstream csv(out / "trajectory.csv");
    csv << "t";
    for (int i = 1; i <= c.n; ++i) csv << ",gamma" << i;
    for (int i = 1; i <= c.n; ++i)
        for (int k = 1; k <= c.n; ++k) csv << ",e" << i << k;
    csv << "\n";
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        csv << fmt(tr.times[s]);
        const FrameState& st = tr.states[s];
        for (int i = 0; i < c.n; ++i) csv << "," << fmt(st.gamma(i));
        for (int i = 0; i < c.n; ++i)
            for (int k = 0; k < c.n; ++k) csv << "," << fmt(st.frame(k, i));
        csv << "\n";
    }
    json rep;
    rep["orthogonality_drift"] = tr.orthogonality_drift;
    rep["closure_defect"] = closure_defect(c, steps);
    rep["frame_length"] = frame_length(c);
    return {rep, {"trajectory.csv"}};
}

CommandResult cmd_frenet_search(const json& cfg, const std::filesystem::path& out) {
    int n = get_int(cfg, "n", 3);
    int m = get_int(cfg, "m", 2);
    if (n < 2 || m < 1) throw ConfigError("need n >= 2 and m >= 1");
    ClosureOptions opts;
    opts.seed = require_seed(cfg, "frenet-search");
    opts.fourier_modes = get_int(cfg, "fourier_modes", opts.fourier_modes);
    opts.delta_floor = get_num(cfg, "delta_floor", opts.delta_floor);
    opts.restarts = get_int(cfg, "restarts", opts.restarts);
    opts.iterations = get_int(cfg, "iterations", opts.iterations);
    opts.mean_curvature_cap = get_num(cfg, "mean_curvature_cap", opts.mean_curvature_cap);
    opts.torsion_cap = get_num(cfg, "torsion_cap", opts.torsion_cap);
    opts.threads = get_int(cfg, "threads", 0);
    ClosureReport rep = closure_search(n, m, opts);
    write_controls_csv(out / "controls.csv", rep.controls);
    json j;
    j["n"] = n;
    j["m"] = m;
    j["converged"] = rep.converged;
    j["defect"] = rep.defect;
    j["verified_defect"] = rep.verified_defect;
    j["frame_length"] = rep.frame_len;
    j["control_minima"] = rep.control_minima;
    j["restarts_used"] = rep.restarts_used;
    j["best_restart"] = rep.best_restart;
    return {j, {"controls.csv"}};
}

CommandResult cmd_milnor(const json& cfg, const std::filesystem::path&) {
    FrenetControls c = get_controls(cfg);
    MilnorReport rep = milnor_check(c, get_num(cfg, "tolerance", 1e-6));
    json j;
    j["frame_length"] = rep.frame_len;
    j["margin"] = rep.margin;
    return {j, {}};
}

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> table = {
        {"reeb", cmd_reeb},
        {"diffuse", cmd_diffuse},
        {"heat", cmd_heat},
        {"kappa", cmd_kappa},
        {"geodesic", cmd_geodesic},
        {"martinet-surface", cmd_martinet_surface},
        {"martinet-cut", cmd_martinet_cut},
        {"martinet-sphere", cmd_martinet_sphere},
        {"frenet-integrate", cmd_frenet_integrate},
        {"frenet-search", cmd_frenet_search},
        {"milnor", cmd_milnor},
    };
    return table;
}

}  // namespace

std::vector<std::string> command_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : handlers()) names.push_back(name);
    return names;
}

int run_command(const RunRequest& req) {
    std::filesystem::path out(req.out_dir.empty() ? "." : req.out_dir);
    try {
        Handler handler = nullptr;
        for (const auto& [name, fn] : handlers())
            if (name == req.command) handler = fn;
        if (!handler) throw ConfigError("unknown command: " + req.command);
        json cfg = load_config(req);
        std::filesystem::create_directories(out);
        auto t0 = std::chrono::steady_clock::now();
        CommandResult result = handler(cfg, out);
        auto t1 = std::chrono::steady_clock::now();
        {
            std::ofstream rf(out / "report.json");
            rf << result.report.dump(2) << "\n";
        }
        json manifest;
        manifest["command"] = req.command;
        manifest["config"] = cfg;
        manifest["outputs"] = result.outputs;
        manifest["outputs"].push_back("report.json");
        manifest["threads"] = default_thread_count();
        manifest["elapsed_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        std::ofstream mf(out / "manifest.json");
        mf << manifest.dump(2) << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        std::ofstream df(out / "diagnostic.json");
        if (df) {
            json d;
            d["command"] = req.command;
            d["error"] = e.what();
            df << d.dump(2) << "\n";
        }
        return 3;
    }
}

}  // namespace srlab
