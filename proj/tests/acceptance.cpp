// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here on purpose; do not loosen them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "srlab/catalog.hpp"
#include "srlab/frenet.hpp"
#include "srlab/kappa.hpp"
#include "srlab/martinet.hpp"
#include "srlab/rng.hpp"
#include "srlab/runner.hpp"

using namespace srlab;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

SymbolicHamiltonian random_degree2(Rng& rng) {
    SymbolicHamiltonian H(3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            SymbolicHamiltonian::Monomial m(3, 0);
            m[static_cast<std::size_t>(i)] += 1;
            m[static_cast<std::size_t>(j)] += 1;
            ScalarExpr c = ScalarExpr::constant(rng.uniform(-1.0, 1.0)) +
                           ScalarExpr::constant(rng.uniform(-1.0, 1.0)) * ScalarExpr::var(i);
            H.add_term(m, c);
        }
    return H;
}

VectorField random_field(Rng& rng) {
    std::vector<ScalarExpr> comps;
    for (int i = 0; i < 3; ++i) {
        ScalarExpr c = ScalarExpr::constant(rng.uniform(-1.0, 1.0));
        for (int v = 0; v < 3; ++v)
            c = c + ScalarExpr::constant(rng.uniform(-1.0, 1.0)) * ScalarExpr::var(v) *
                        ScalarExpr::var((v + 1) % 3);
        comps.push_back(c);
    }
    return VectorField(3, comps);
}

std::array<double, 3> rand3(Rng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

GridMetricField unimodular_grid(int n_nodes, double amp) {
    GridSpec spec;
    spec.shape = {1, 1, n_nodes};
    auto sp = std::make_shared<const GridSpec>(spec);
    std::string a = std::to_string(amp);
    return GridMetricField::sample(sp, parse_expr("1 + " + a + "*sin(x3)", 3),
                                   ScalarExpr::constant(0.0),
                                   parse_expr("1/(1 + " + a + "*sin(x3))", 3));
}

// ---- criteria -------------------------------------------------------------

void poisson_suite(Check& c) {
    Rng rng = Rng::stream(17, 0);
    SymbolicHamiltonian F = random_degree2(rng), G = random_degree2(rng), H = random_degree2(rng);
    SymbolicHamiltonian anti = poisson_bracket(F, G) + poisson_bracket(G, F);
    SymbolicHamiltonian jacobi = poisson_bracket(F, poisson_bracket(G, H)) +
                                 poisson_bracket(G, poisson_bracket(H, F)) +
                                 poisson_bracket(H, poisson_bracket(F, G));
    SymbolicHamiltonian leibniz =
        poisson_bracket(F, G * H) - poisson_bracket(F, G) * H - G * poisson_bracket(F, H);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto q = rand3(rng, -1, 1), p = rand3(rng, -1, 1);
        worst = std::max({worst, std::abs(anti.eval(q, p)), std::abs(jacobi.eval(q, p)),
                          std::abs(leibniz.eval(q, p))});
    }
    c.require(worst <= 1e-9, "algebra identities worst " + num(worst));

    VectorField vf = random_field(rng), vg = random_field(rng);
    SymbolicHamiltonian lhs = poisson_bracket(hamiltonian_lift(vf), hamiltonian_lift(vg));
    SymbolicHamiltonian rhs = hamiltonian_lift(lie_bracket(vf, vg));
    double worst_lift = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto q = rand3(rng, -1, 1), p = rand3(rng, -1, 1);
        worst_lift = std::max(worst_lift, std::abs(lhs.eval(q, p) - rhs.eval(q, p)));
    }
    c.require(worst_lift <= 1e-9, "lift intertwiner worst " + num(worst_lift));
    c.note("identities " + num(worst) + ", intertwiner " + num(worst_lift));
}

void heisenberg_relations(Check& c) {
    auto heis = catalog::heisenberg_frame();
    c.require(heisenberg_relations_hold(heis), "relation predicate false");
    VectorField f12 = lie_bracket(heis.f1, heis.f2);
    VectorField d1 = lie_bracket(heis.f1, f12);
    VectorField d2 = lie_bracket(heis.f2, f12);
    Rng rng = Rng::stream(17, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto q = rand3(rng, -1, 1);
        worst = std::max({worst, d1.eval(q).cwiseAbs().maxCoeff(), d2.eval(q).cwiseAbs().maxCoeff()});
    }
    c.require(worst <= 1e-12, "double brackets worst " + num(worst));
    c.note("double brackets " + num(worst));
}

void reeb_formula_cross_check(Check& c) {
    std::vector<ContactMetric> metrics{
        catalog::heisenberg_flat(),
        catalog::heisenberg_unimodular_z(0.3),  // non-constant A, delta = 1
        catalog::heisenberg_metric(MetricCoeffs(parse_expr("1 + x3^2/8", 3),
                                                ScalarExpr::constant(0.0),
                                                parse_expr("2 + sin(x2)/4", 3)))  // non-constant delta
    };
    Rng rng = Rng::stream(17, 2);
    double worst = 0.0;
    for (const auto& s : metrics) {
        SymbolicHamiltonian geometric = reeb_field(s.frame, s.A).u_h;
        SymbolicHamiltonian formula = reeb_lift_formula(s.frame, s.A);
        for (int i = 0; i < 30; ++i) {
            auto q = rand3(rng, -0.8, 0.8), p = rand3(rng, -1, 1);
            double a = geometric.eval(q, p), b = formula.eval(q, p);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    }
    c.require(worst <= 1e-8, "lift disagreement " + num(worst));
    c.note("3 metrics, worst rel " + num(worst));
}

void averaging_oracle(Check& c) {
    GridSpec spec;
    spec.shape = {1, 1, 64};
    auto sp = std::make_shared<const GridSpec>(spec);
    auto constant = GridMetricField::sample(sp, ScalarExpr::constant(1.3),
                                            ScalarExpr::constant(0.2), ScalarExpr::constant(0.9));
    auto [fixed, rep0] = averaging_step(constant, 0.3);
    c.require(constant.sup_distance(fixed) <= 1e-10,
              "constant metric moved " + num(constant.sup_distance(fixed)));

    const double eps = 0.3, amp = 0.3;
    auto field = unimodular_grid(64, amp);
    auto [next, rep] = averaging_step(field, eps);
    double factor = std::sin(eps) / eps;  // window average of a pure sine mode
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
        double z = next.spec->coordinate(2, k);
        worst = std::max(worst, std::abs(next.a11.values()(k) - (1 + amp * factor * std::sin(z))));
    }
    c.require(worst <= 1e-8, "window oracle error " + num(worst));
    c.note("contraction factor " + num(factor) + ", error " + num(worst));
}

void det_invariance(Check& c) {
    struct Case {
        ContactMetric s;
        Eigen::Vector3d q;
    };
    std::vector<Case> cases{{catalog::heisenberg_flat(), {0.2, -0.1, 0.3}},
                            {catalog::heisenberg_unimodular_z(0.3), {0.0, 0.0, 0.7}},
                            {catalog::su2_killing(), {0.1, 0.05, -0.08}},
                            {catalog::martinet_flat(), {0.5, 0.2, 0.1}}};
    double worst = 0.0;
    for (const auto& k : cases)
        worst = std::max(worst, det_transport_check(k.s.frame, k.s.A, k.q, 0.5));
    c.require(worst <= 1e-8, "reeb transport drift " + num(worst));

    // the unimodular family has det = 1 everywhere and cannot drift under
    // any transport; the flat structure along f1 gives the honest control
    auto flat = catalog::heisenberg_flat();
    double neg = det_transport_check(flat.frame, flat.A, Eigen::Vector3d(0.2, -0.1, 0.3), 0.5,
                                     TransportGenerator::Frame1);
    c.require(neg > 1e-3, "negative control too small " + num(neg));
    c.note("4 metrics drift " + num(worst) + ", control " + num(neg));
}

void heat_oracle(Check& c) {
    const double amp = 0.03, T = 0.1, dt = 0.004;
    auto field = unimodular_grid(32, amp);
    HeatResult res = evolve_heat(field, 1.0, T, dt);
    c.require(!res.halted_rank_drop, "rank drop halt");
    double decayed = amp * std::exp(-T);
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
        double z = res.field.spec->coordinate(2, k);
        worst = std::max(worst, std::abs(res.field.a11.values()(k) - (1 + decayed * std::sin(z))));
    }
    c.require(worst <= 1e-4, "spectral oracle error " + num(worst));

    GridSpec spec;
    spec.shape = {1, 1, 32};
    auto sp = std::make_shared<const GridSpec>(spec);
    auto flat = GridMetricField::sample(sp, ScalarExpr::constant(1.5), ScalarExpr::constant(0.0),
                                        ScalarExpr::constant(0.8));
    HeatResult still = evolve_heat(flat, 1.0, 0.05, 0.005);
    c.require(flat.sup_distance(still.field) <= 1e-12,
              "constants drift " + num(flat.sup_distance(still.field)));
    c.note("oracle error " + num(worst));
}

void kappa_suite(Check& c) {
    auto flat = catalog::heisenberg_flat();
    double k_flat = std::abs(kappa_estimate(flat.frame, flat.A, Eigen::Vector3d(0.2, -0.1, 0.3)));
    c.require(k_flat <= 1e-6, "flat kappa " + num(k_flat));

    auto su2 = catalog::su2_killing();
    const double oracle = 4.0;  // quotient is the radius-1/2 sphere
    Rng rng = Rng::stream(17, 3);
    double mn = 1e300, mx = -1e300;
    for (int i = 0; i < 20; ++i) {
        Eigen::Vector3d q(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15),
                          rng.uniform(-0.15, 0.15));
        double k = kappa_estimate(su2.frame, su2.A, q);
        mn = std::min(mn, k);
        mx = std::max(mx, k);
    }
    c.require(mx - mn < 1e-5, "su2 spread " + num(mx - mn));
    c.require(std::abs(mn - oracle) <= 1e-4 && std::abs(mx - oracle) <= 1e-4,
              "su2 range [" + num(mn) + ", " + num(mx) + "] off oracle");

    Eigen::Vector3d q0(0.1, -0.05, 0.08);
    auto orbit = reeb_transport(su2.frame, su2.A, q0, 0.5, 1e-2);
    double drift = std::abs(kappa_estimate(su2.frame, su2.A, orbit.points.back()) -
                            kappa_estimate(su2.frame, su2.A, orbit.points.front()));
    c.require(drift <= 1e-6, "orbit drift " + num(drift));
    c.note("flat " + num(k_flat) + ", su2 [" + num(mn) + ", " + num(mx) + "], orbit " + num(drift));
}

void cut_locus(Check& c) {
    BvpOptions opts;
    opts.seed = 101;
    opts.restarts = 64;

    const double on_plane[10][2] = {{0.15, 0.01},  {0.2, 0.01},  {0.25, 0.02}, {0.3, 0.015},
                                    {-0.15, 0.01}, {-0.2, 0.02}, {-0.25, 0.01}, {-0.3, 0.02},
                                    {0.18, 0.005}, {-0.22, 0.005}};
    int bad_mult = 0, bad_len = 0;
    for (const auto& pr : on_plane) {
        auto rep = cut_locus_probe(Eigen::Vector3d(0.0, pr[0], pr[1]), opts);
        if (rep.bvp.multiplicity < 2) ++bad_mult;
        std::vector<double> lens;
        for (const auto& s : rep.bvp.solutions)
            if (s.length <= rep.bvp.distance + 1e-6) lens.push_back(s.length);
        if (lens.size() < 2 ||
            *std::max_element(lens.begin(), lens.end()) -
                    *std::min_element(lens.begin(), lens.end()) > 1e-6)
            ++bad_len;
    }
    c.require(bad_mult == 0, std::to_string(bad_mult) + " on-plane probes below multiplicity 2");
    c.require(bad_len == 0, std::to_string(bad_len) + " probes fail 1e-6 length agreement");

    const double off_plane[10][3] = {{0.2, 0.1, 0.02},  {0.25, 0.1, 0.02},  {0.3, 0.15, 0.01},
                                     {-0.2, 0.1, 0.02}, {-0.25, 0.15, 0.01}, {0.2, -0.1, 0.01},
                                     {0.3, 0.05, 0.02}, {-0.3, -0.1, 0.01}, {0.25, 0.2, 0.015},
                                     {-0.2, -0.15, 0.02}};
    int bad_off = 0;
    for (const auto& pr : off_plane) {
        auto rep = cut_locus_probe(Eigen::Vector3d(pr[0], pr[1], pr[2]), opts);
        if (rep.bvp.multiplicity != 1) ++bad_off;
    }
    c.require(bad_off == 0, std::to_string(bad_off) + " off-plane probes not simple");

    double worst_axis = 0.0;
    for (double t : {0.1, 0.2, 0.3})
        worst_axis = std::max(worst_axis, std::abs(sr_distance(Eigen::Vector3d(0, t, 0), opts) - t));
    c.require(worst_axis <= 1e-4, "axis distance error " + num(worst_axis));
    c.note("axis error " + num(worst_axis));
}

void sphere(Check& c) {
    auto set = sphere_sample(0.2);
    c.require(set.smooth_components == 2,
              "smooth components " + std::to_string(set.smooth_components));
    c.require(set.locus_loops == 1, "locus loops " + std::to_string(set.locus_loops));
    c.require(set.resolution_ok, "resolution flag: " + set.note);
    c.note(std::to_string(set.locus_polyline.size()) + " locus nodes");
}

void frenet(Check& c) {
    FrenetControls probe;
    probe.n = 3;
    probe.m = 2;  // horizon 4*pi
    probe.u = {FourierSeries{1.0, {0.1}, {0.05}, 0.5}, FourierSeries{0.3, {0.05}, {0.0}, 0.5}};
    auto traj = integrate_frenet(probe, 256);
    c.require(traj.orthogonality_drift <= 1e-10, "orthogonality " + num(traj.orthogonality_drift));

    ClosureOptions opts;  // library defaults, seed 0
    auto good = closure_search(3, 2, opts);
    c.require(good.converged, "closure_search(3,2) did not converge");
    if (good.converged) {
        c.require(good.verified_defect < 1e-6, "(3,2) defect " + num(good.verified_defect));
        c.require(good.control_minima.size() == 2 && good.control_minima[1] >= 1e-3,
                  "(3,2) min u2 " + num(good.control_minima.empty() ? -1 : good.control_minima[1]));
        double replay = closure_defect(good.controls, opts.verify_steps_per_period);
        c.require(replay < 1e-6, "(3,2) certificate replay " + num(replay));
        auto milnor = milnor_check(good.controls);
        c.require(milnor.margin > 0, "(3,2) milnor margin " + num(milnor.margin));
        c.note("(3,2) defect " + num(good.verified_defect) + ", margin " + num(milnor.margin));
    }

    auto bad = closure_search(3, 1, opts);
    c.require(!bad.converged, "closure_search(3,1) unexpectedly converged");
    c.require(bad.defect > 1e-3, "(3,1) best defect " + num(bad.defect) + " suspiciously small");
    c.note("(3,1) best defect " + num(bad.defect) + " over " + std::to_string(bad.restarts_used) +
           " restarts (evidential)");
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

void determinism(Check& c) {
    fs::path root = fs::temp_directory_path() / "srlab-acceptance-determinism";
    fs::remove_all(root);
    fs::create_directories(root);

    struct Job {
        std::string command;
        std::string config;
        bool seed;
    };
    std::vector<Job> jobs{
        {"martinet-cut", R"({"q1": [0.0, 0.2, 0.01], "restarts": 64})", true},
        {"martinet-sphere", R"({"r": 0.2})", false},
        {"frenet-search", R"({"n": 3, "m": 2})", true},
    };
    for (const auto& job : jobs) {
        fs::path dir = root / job.command;
        fs::create_directories(dir);
        fs::path cfg = dir / "config.json";
        std::ofstream(cfg) << job.config;
        for (const char* tag : {"a", "b"}) {
            RunRequest req;
            req.command = job.command;
            req.config_path = cfg.string();
            req.out_dir = (dir / tag).string();
            if (job.seed) req.seed = 7;
            int code = run_command(req);
            c.require(code == 0, job.command + " run " + tag + " exited " + std::to_string(code));
        }
        for (const auto& entry : fs::directory_iterator(dir / "a")) {
            std::string name = entry.path().filename().string();
            if (name == "manifest.json") continue;  // carries wall-clock timings
            c.require(same_bytes(entry.path(), dir / "b" / name),
                      job.command + "/" + name + " differs between reruns");
        }
    }
    c.note("martinet-cut, martinet-sphere, frenet-search replayed");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        std::function<void(Check&)> fn;
    };
    std::vector<Criterion> criteria{
        {1, "poisson/lie algebra identities", poisson_suite},
        {2, "heisenberg double brackets vanish", heisenberg_relations},
        {3, "reeb lift formula cross-check", reeb_formula_cross_check},
        {4, "averaging fixed point and window oracle", averaging_oracle},
        {5, "det invariance along reeb transport", det_invariance},
        {6, "heat flow spectral oracle", heat_oracle},
        {7, "quotient curvature kappa", kappa_suite},
        {8, "martinet cut locus probes", cut_locus},
        {9, "martinet sphere topology", sphere},
        {10, "frenet closure search", frenet},
        {11, "determinism of stochastic pipelines", determinism},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        Check check;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.fn(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d %-42s %s  (%.1fs)  %s\n", cr.id, cr.label,
                    check.ok ? "PASS" : "FAIL", secs, check.detail.str().c_str());
        std::fflush(stdout);
        if (!check.ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
