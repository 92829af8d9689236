#include <doctest.h>

#include "srlab/catalog.hpp"
#include "srlab/rng.hpp"

using namespace srlab;

TEST_CASE("parse and evaluate") {
    std::array<double, 3> q{3.0, 0.0, 0.0};
    CHECK(parse_expr("x1^2", 3).eval(q) == doctest::Approx(9.0));
    std::array<double, 3> r{0.0, 5.0, 0.0};
    CHECK(parse_expr("x1*x2 + sin(x3)", 3).eval(r) == doctest::Approx(0.0));
    CHECK_THROWS_AS(parse_expr("x1/x1", 3).eval(r), EvalError);
    CHECK_THROWS_AS(parse_expr("x4", 3), ParseError);
    CHECK_THROWS_AS(parse_expr("bogus(x1)", 3), ParseError);
    CHECK(parse_expr("pi", 1).eval(std::array<double, 1>{0.0}) == doctest::Approx(M_PI));
}

TEST_CASE("parser round-trip") {
    Rng rng = Rng::stream(3, 0);
    auto e = parse_expr("x1^2*sin(x2) - exp(x3)/(1 + x1^2) + cos(x2*x3)", 3);
    auto back = parse_expr(e.str(), 3);
    for (int i = 0; i < 100; ++i) {
        std::array<double, 3> q{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        CHECK(e.eval(q) == doctest::Approx(back.eval(q)).epsilon(1e-14));
    }
}

TEST_CASE("symbolic derivative oracles") {
    auto x1sq = parse_expr("x1^2", 3);
    std::array<double, 3> q{1.5, 2.0, 0.0};
    CHECK(x1sq.diff(0).eval(q) == doctest::Approx(3.0));
    CHECK(x1sq.diff(1).eval(q) == doctest::Approx(0.0));
    CHECK(parse_expr("sin(x3)", 3).diff(2).eval(std::array<double, 3>{0, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("derivative matches central differences") {
    auto e = parse_expr("x1^3*cos(x2) + exp(x3/2)*x2", 3);
    Rng rng = Rng::stream(3, 1);
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
        std::array<double, 3> q{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        for (int v = 0; v < 3; ++v) {
            auto qp = q, qm = q;
            qp[static_cast<std::size_t>(v)] += h;
            qm[static_cast<std::size_t>(v)] -= h;
            double num = (e.eval(qp) - e.eval(qm)) / (2 * h);
            double sym = e.diff(v).eval(q);
            CHECK(std::abs(sym - num) <= 1e-6 * std::max(1.0, std::abs(sym)));
        }
    }
}

namespace {
VectorField random_field(Rng& rng) {
    std::vector<ScalarExpr> comps;
    for (int i = 0; i < 3; ++i) {
        ScalarExpr c = ScalarExpr::constant(rng.uniform(-1.0, 1.0));
        for (int v = 0; v < 3; ++v)
            c = c + ScalarExpr::constant(rng.uniform(-1.0, 1.0)) * ScalarExpr::var(v) +
                ScalarExpr::constant(rng.uniform(-0.5, 0.5)) * ScalarExpr::var(v) * ScalarExpr::var((v + 1) % 3);
        comps.push_back(c);
    }
    return VectorField(3, comps);
}
}  // namespace

TEST_CASE("lie bracket examples") {
    auto martinet = catalog::martinet_frame();
    auto br = lie_bracket(martinet.f1, martinet.f2);
    std::array<double, 3> q{1.0, 0.0, 0.0};
    Eigen::VectorXd v = br.eval(q);
    CHECK(v(0) == doctest::Approx(0.0));
    CHECK(v(1) == doctest::Approx(0.0));
    CHECK(v(2) == doctest::Approx(2.0));

    auto heis = catalog::heisenberg_frame();
    auto doublebr = lie_bracket(heis.f1, lie_bracket(heis.f1, heis.f2));
    Rng rng = Rng::stream(3, 2);
    auto f = random_field(rng);
    std::array<double, 3> p{0.3, -0.7, 1.1};
    CHECK(doublebr.eval(p).norm() == doctest::Approx(0.0));
    CHECK(lie_bracket(f, f).eval(p).norm() == doctest::Approx(0.0));
}

TEST_CASE("jacobi identity at random points") {
    Rng rng = Rng::stream(3, 3);
    VectorField F = random_field(rng), G = random_field(rng), H = random_field(rng);
    auto cyc = lie_bracket(F, lie_bracket(G, H)) + lie_bracket(G, lie_bracket(H, F)) +
               lie_bracket(H, lie_bracket(F, G));
    for (int i = 0; i < 100; ++i) {
        std::array<double, 3> q{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        CHECK(cyc.eval(q).norm() <= 1e-9);
    }
}

TEST_CASE("bracket flag dimensions") {
    auto martinet = catalog::martinet_frame();
    std::array<double, 3> origin{0, 0, 0};
    CHECK(bracket_flag_dim(martinet, origin, 1) == 2);
    CHECK(bracket_flag_dim(martinet, origin, 2) == 2);
    CHECK(bracket_flag_dim(martinet, origin, 3) == 3);
    auto heis = catalog::heisenberg_frame();
    std::array<double, 3> q{0.4, -0.3, 0.9};
    CHECK(bracket_flag_dim(heis, q, 1) == 2);
    CHECK(bracket_flag_dim(heis, q, 2) == 3);
    // nondecreasing in k, capped at the chart dimension
    for (int k = 3; k <= 5; ++k) CHECK(bracket_flag_dim(heis, q, k) == 3);
}
