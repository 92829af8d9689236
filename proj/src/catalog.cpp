#include "srlab/catalog.hpp"

namespace srlab::catalog {

namespace {

ScalarExpr c(double v) { return ScalarExpr::constant(v); }
ScalarExpr x(int i) { return ScalarExpr::var(i); }

}  // namespace

Frame2 heisenberg_frame() {
    VectorField f1 = VectorField::coordinate(3, 0);
    VectorField f2(3, {c(0.0), c(1.0), x(0)});
    return Frame2(f1, f2);
}

Frame2 martinet_frame() {
    VectorField f1 = VectorField::coordinate(3, 0);
    VectorField f2(3, {c(0.0), c(1.0), pow(x(0), 2)});
    return Frame2(f1, f2);
}

Frame2 su2_frame() {
    ScalarExpr r2 = pow(x(0), 2) + pow(x(1), 2) + pow(x(2), 2);
    ScalarExpr half = c(0.5);
    auto field = [&](int a) {
        // X_a = ((1 - r^2)/2) e_a + x × e_a + (x·e_a) x
        std::vector<ScalarExpr> comps(3);
        for (int i = 0; i < 3; ++i) comps[static_cast<std::size_t>(i)] = c(0.0);
        comps[static_cast<std::size_t>(a)] = half * (c(1.0) - r2);
        int b = (a + 1) % 3, d = (a + 2) % 3;
        // x × e_a has components: (e_a)_k contribution: (x × e_a)_b = x_d·(-1)?; use ε directly.
        // (x × e_a)_i = ε_{i j a} x_j
        comps[static_cast<std::size_t>(b)] = comps[static_cast<std::size_t>(b)] + x(d);
        comps[static_cast<std::size_t>(d)] = comps[static_cast<std::size_t>(d)] - x(b);
        for (int i = 0; i < 3; ++i)
            comps[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)] + x(a) * x(i);
        return VectorField(3, std::move(comps));
    };
    return Frame2(field(0), field(1));
}

ContactMetric heisenberg_flat() { return {"heisenberg-flat", heisenberg_frame(), MetricCoeffs::identity()}; }

ContactMetric heisenberg_metric(const MetricCoeffs& A) { return {"heisenberg", heisenberg_frame(), A}; }

ContactMetric martinet_flat() { return {"martinet-flat", martinet_frame(), MetricCoeffs::identity()}; }

ContactMetric su2_killing() { return {"su2-killing", su2_frame(), MetricCoeffs::identity()}; }

ContactMetric heisenberg_unimodular_z(double amplitude) {
    ScalarExpr a = c(1.0) + c(amplitude) * sin(x(2));
    return {"heisenberg-unimodular-z", heisenberg_frame(), MetricCoeffs(a, c(0.0), c(1.0) / a)};
}

ContactMetric by_name(const std::string& name) {
    if (name == "heisenberg-flat") return heisenberg_flat();
    if (name == "martinet-flat") return martinet_flat();
    if (name == "su2-killing") return su2_killing();
    if (name == "heisenberg-unimodular-z") return heisenberg_unimodular_z();
    const std::string prefix = "heisenberg(";
    if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
        std::string body = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            std::size_t semi = body.find(';', start);
            parts.push_back(body.substr(start, semi == std::string::npos ? semi : semi - start));
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        if (parts.size() != 3)
            throw std::invalid_argument("heisenberg(...) expects three ';'-separated expressions");
        return heisenberg_metric(MetricCoeffs(parse_expr(parts[0], 3), parse_expr(parts[1], 3),
                                              parse_expr(parts[2], 3)));
    }
    throw std::invalid_argument("unknown catalog structure: " + name);
}

}  // namespace srlab::catalog
