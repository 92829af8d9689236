#include <doctest.h>

#include "srlab/catalog.hpp"
#include "srlab/rng.hpp"

using namespace srlab;

namespace {

double eval_at(const SymbolicHamiltonian& H, const std::array<double, 3>& q,
               const std::array<double, 3>& p) {
    return H.eval(q, p);
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
            c = c + ScalarExpr::constant(rng.uniform(-1.0, 1.0)) * ScalarExpr::var(v) * ScalarExpr::var((v + 1) % 3);
        comps.push_back(c);
    }
    return VectorField(3, comps);
}

}  // namespace

TEST_CASE("canonical pairs and lift examples") {
    auto heis = catalog::heisenberg_frame();
    SymbolicHamiltonian v1 = hamiltonian_lift(heis.f1);
    SymbolicHamiltonian v2 = hamiltonian_lift(heis.f2);
    // {v1, v2} is the lift of [f1, f2] = ∂x3, i.e. p3
    SymbolicHamiltonian br = poisson_bracket(v1, v2);
    std::array<double, 3> q{0.7, -0.2, 0.4}, p{0.3, 1.1, -0.8};
    CHECK(eval_at(br, q, p) == doctest::Approx(p[2]));
    CHECK(eval_at(poisson_bracket(v1, br), q, p) == doctest::Approx(0.0));
    CHECK(eval_at(poisson_bracket(v2, poisson_bracket(v2, v1)), q, p) == doctest::Approx(0.0));
    CHECK(heisenberg_relations_hold(heis));
    CHECK_FALSE(heisenberg_relations_hold(catalog::su2_frame()));

    // {p1, x1} = +1 with the documented sign convention
    SymbolicHamiltonian x1 = SymbolicHamiltonian::scalar(3, ScalarExpr::var(0));
    SymbolicHamiltonian p1 = SymbolicHamiltonian::momentum(3, 0, ScalarExpr::constant(1.0));
    CHECK(eval_at(poisson_bracket(p1, x1), q, p) == doctest::Approx(1.0));
}

TEST_CASE("poisson algebra properties at random points") {
    Rng rng = Rng::stream(5, 0);
    SymbolicHamiltonian F = random_degree2(rng), G = random_degree2(rng), H = random_degree2(rng);
    SymbolicHamiltonian anti = poisson_bracket(F, G) + poisson_bracket(G, F);
    SymbolicHamiltonian jacobi = poisson_bracket(F, poisson_bracket(G, H)) +
                                 poisson_bracket(G, poisson_bracket(H, F)) +
                                 poisson_bracket(H, poisson_bracket(F, G));
    SymbolicHamiltonian leibniz = poisson_bracket(F, G * H) - poisson_bracket(F, G) * H -
                                  G * poisson_bracket(F, H);
    for (int i = 0; i < 100; ++i) {
        std::array<double, 3> q{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        std::array<double, 3> p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        CHECK(std::abs(eval_at(anti, q, p)) <= 1e-9);
        CHECK(std::abs(eval_at(jacobi, q, p)) <= 1e-9);
        CHECK(std::abs(eval_at(leibniz, q, p)) <= 1e-9);
    }
}

TEST_CASE("lifts intertwine brackets") {
    Rng rng = Rng::stream(5, 1);
    for (int trial = 0; trial < 50; ++trial) {
        VectorField F = random_field(rng), G = random_field(rng);
        SymbolicHamiltonian lhs = poisson_bracket(hamiltonian_lift(F), hamiltonian_lift(G));
        SymbolicHamiltonian rhs = hamiltonian_lift(lie_bracket(F, G));
        std::array<double, 3> q{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        std::array<double, 3> p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        CHECK(std::abs(eval_at(lhs, q, p) - eval_at(rhs, q, p)) <= 1e-9);
    }
}

TEST_CASE("metric hamiltonian") {
    auto heis = catalog::heisenberg_frame();
    SymbolicHamiltonian h = metric_hamiltonian(heis, MetricCoeffs::identity());
    std::array<double, 3> q{0.5, 0.3, -0.2}, p{0.4, -0.6, 0.9};
    double expect = p[0] * p[0] + (p[1] + q[0] * p[2]) * (p[1] + q[0] * p[2]);
    CHECK(eval_at(h, q, p) == doctest::Approx(expect));
    CHECK(h.degree() == 2);

    MetricCoeffs diag(ScalarExpr::constant(4.0), ScalarExpr::constant(0.0), ScalarExpr::constant(1.0));
    SymbolicHamiltonian h2 = metric_hamiltonian(heis, diag);
    CHECK(eval_at(h2, q, p) == doctest::Approx(4 * p[0] * p[0] + (p[1] + q[0] * p[2]) * (p[1] + q[0] * p[2])));

    // kernel: covectors proportional to ω = x1 dx2 − dx3 annihilate Δ
    std::array<double, 3> omega{0.0, q[0], -1.0};
    CHECK(eval_at(h, q, omega) == doctest::Approx(0.0));
}

TEST_CASE("normalized contact form") {
    auto s = catalog::heisenberg_flat();
    ContactForm omega = normalized_contact_form(s.frame, s.A);
    std::array<double, 3> q{0.8, -0.4, 0.3};
    Eigen::Vector3d w = omega.eval(q);
    // flat Heisenberg: ω = x1 dx2 − dx3
    CHECK(w(0) == doctest::Approx(0.0));
    CHECK(w(1) == doctest::Approx(q[0]));
    CHECK(w(2) == doctest::Approx(-1.0));
    CHECK(omega.d_omega(s.frame.f1, s.frame.f2, q) == doctest::Approx(1.0));

    // Martinet frame: contact condition fails on the surface x1 = 0
    std::array<std::array<double, 3>, 1> pts{{{0.0, 0.1, 0.2}}};
    CHECK_THROWS_AS(normalized_contact_form(catalog::martinet_frame(), MetricCoeffs::identity(), pts),
                    ContactError);
}

TEST_CASE("reeb field and lift formula") {
    auto flat = catalog::heisenberg_flat();
    ReebField reeb = reeb_field(flat.frame, flat.A);
    std::array<double, 3> q{0.3, 0.2, -0.5};
    Eigen::VectorXd e = reeb.e.eval(q);
    CHECK(e(0) == doctest::Approx(0.0));
    CHECK(e(1) == doctest::Approx(0.0));
    CHECK(e(2) == doctest::Approx(-1.0));

    // unimodular non-constant metrics keep e = −∂x3
    auto unimod = catalog::heisenberg_unimodular_z(0.3);
    Eigen::VectorXd e2 = reeb_field(unimod.frame, unimod.A).e.eval(q);
    CHECK(e2(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(e2(1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(e2(2) == doctest::Approx(-1.0));

    // formula vs geometric lift on three catalog metrics
    Rng rng = Rng::stream(5, 2);
    MetricCoeffs expphi(parse_expr("exp(x1/2)", 3), ScalarExpr::constant(0.0), parse_expr("exp(-x1/2)", 3));
    std::vector<ContactMetric> metrics{flat, unimod, catalog::heisenberg_metric(expphi),
                                       catalog::heisenberg_metric(MetricCoeffs(
                                           parse_expr("1 + x3^2/8", 3), ScalarExpr::constant(0.0),
                                           parse_expr("2 + sin(x2)/4", 3)))};
    for (const auto& s : metrics) {
        SymbolicHamiltonian geometric = reeb_field(s.frame, s.A).u_h;
        SymbolicHamiltonian formula = reeb_lift_formula(s.frame, s.A);
        for (int i = 0; i < 25; ++i) {
            std::array<double, 3> x{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
            std::array<double, 3> p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            double a = eval_at(geometric, x, p), b = eval_at(formula, x, p);
            CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("invariance bracket degree bookkeeping") {
    auto s = catalog::heisenberg_unimodular_z(0.3);
    SymbolicHamiltonian h = metric_hamiltonian(s.frame, s.A);
    SymbolicHamiltonian u = reeb_lift_formula(s.frame, s.A);
    CHECK(u.degree() == 1);
    CHECK(h.degree() == 2);
    SymbolicHamiltonian br = poisson_bracket(u, h);
    CHECK(br.degree() <= 2);

    // flat Heisenberg: {u_h, h} vanishes identically
    auto flat = catalog::heisenberg_flat();
    SymbolicHamiltonian zero = poisson_bracket(reeb_lift_formula(flat.frame, flat.A),
                                               metric_hamiltonian(flat.frame, flat.A));
    Rng rng = Rng::stream(5, 3);
    for (int i = 0; i < 20; ++i) {
        std::array<double, 3> q{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        std::array<double, 3> p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        CHECK(std::abs(eval_at(zero, q, p)) <= 1e-12);
    }
}
