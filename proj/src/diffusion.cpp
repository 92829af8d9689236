#include "srlab/diffusion.hpp"

#include <cmath>
#include <limits>

#include "srlab/parallel.hpp"
#include "srlab/rng.hpp"

namespace srlab {

namespace {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on
/// the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

Eigen::Matrix<double, 2, 3> frame_rows(double x1) {
    Eigen::Matrix<double, 2, 3> F;
    F << 1.0, 0.0, 0.0, 0.0, 1.0, x1;
    return F;
}

/// (F F^T)^{-1} F, the map extracting (v1, v2) coefficients from a fiber
/// form whose kernel contains the contact annihilator.
Eigen::Matrix<double, 2, 3> frame_pinv(double x1) {
    Eigen::Matrix<double, 2, 3> F = frame_rows(x1);
    Eigen::Matrix2d FFt = F * F.transpose();
    return FFt.inverse() * F;
}

std::vector<Eigen::Vector3d> residual_covectors() {
    Rng rng = Rng::stream(0x5eedc0de, 0);
    std::vector<Eigen::Vector3d> out;
    for (int i = 0; i < 8; ++i) {
        Eigen::Vector3d p(rng.normal(), rng.normal(), rng.normal());
        out.push_back(p.normalized());
    }
    return out;
}

struct CoreResult {
    Eigen::ArrayXd u11, u12, u22;  // unnormalized integral, per node
    double det_drift_max = 0.0;
    int skipped = 0;
    std::vector<char> skip_mask;
};

/// Quadrature of the transported fiber form over t in [-eps, eps] with
/// raw Gauss-Legendre weights (sum 2*eps). Skipped nodes keep a NaN
/// placeholder and are patched by the caller.
CoreResult averaging_core(const GridMetricField& field, const GridVectorField& ef, double eps,
                          const AveragingOptions& opts) {
    const GridSpec& spec = *field.spec;
    int n = spec.count();
    std::vector<double> gl_x, gl_w;
    gauss_legendre(opts.quadrature_nodes, gl_x, gl_w);
    double step = std::max(1e-12, opts.orbit_step_fraction * eps);

    CoreResult res;
    res.u11.resize(n);
    res.u12.resize(n);
    res.u22.resize(n);
    res.skip_mask.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> drift(static_cast<std::size_t>(n), 0.0);

    auto e_eval = [&ef](const Eigen::Vector3d& x) { return ef.eval(x); };
    auto jac_eval = [&ef](const Eigen::Vector3d& x) { return ef.jacobian(x); };

    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t idx) {
            Eigen::Vector3d q = spec.point(static_cast<int>(idx));
            Eigen::Matrix<double, 2, 3> P = frame_pinv(q(0));
            auto ei = static_cast<Eigen::Index>(idx);
            Eigen::Matrix2d A0;
            A0 << field.a11.values()(ei), field.a12.values()(ei), field.a12.values()(ei),
                field.a22.values()(ei);
            double det0 = A0.determinant();
            Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
            try {
                for (std::size_t j = 0; j < gl_x.size(); ++j) {
                    double t = eps * gl_x[j];
                    CotangentTransport tr = transport_along(e_eval, jac_eval, q, t, step);
                    const Eigen::Vector3d& x = tr.points.back();
                    const Eigen::Matrix3d& M = tr.maps.back();
                    Eigen::Matrix<double, 2, 3> B = frame_rows(x(0)) * M;
                    std::array<double, 3> xv{x(0), x(1), x(2)};
                    Eigen::Matrix2d At = field.interp(std::span<const double>(xv.data(), 3));
                    Eigen::Matrix3d St = B.transpose() * At * B;
                    S += (eps * gl_w[j]) * St;
                    Eigen::Matrix2d Gt = P * St * P.transpose();
                    drift[idx] = std::max(drift[idx], std::abs(Gt.determinant() - det0));
                }
                Eigen::Matrix2d U = P * S * P.transpose();
                res.u11(static_cast<Eigen::Index>(idx)) = U(0, 0);
                res.u12(static_cast<Eigen::Index>(idx)) = 0.5 * (U(0, 1) + U(1, 0));
                res.u22(static_cast<Eigen::Index>(idx)) = U(1, 1);
            } catch (const DomainExitError&) {
                res.skip_mask[idx] = 1;
                res.u11(static_cast<Eigen::Index>(idx)) = res.u12(static_cast<Eigen::Index>(idx)) =
                    res.u22(static_cast<Eigen::Index>(idx)) = std::nan("");
            }
        },
        opts.threads);

    for (int i = 0; i < n; ++i) {
        res.det_drift_max = std::max(res.det_drift_max, drift[static_cast<std::size_t>(i)]);
        res.skipped += res.skip_mask[static_cast<std::size_t>(i)];
    }
    return res;
}

GridMetricField assemble(const GridMetricField& in, const CoreResult& core, double scale) {
    GridMetricField out = in;
    for (int i = 0; i < in.spec->count(); ++i) {
        auto e = static_cast<Eigen::Index>(i);
        if (core.skip_mask[static_cast<std::size_t>(i)]) continue;  // held at input value
        out.a11.values()(e) = scale * core.u11(e);
        out.a12.values()(e) = scale * core.u12(e);
        out.a22.values()(e) = scale * core.u22(e);
    }
    return out;
}

}  // namespace

GridFrameAlgebra GridFrameAlgebra::heisenberg(const GridSpecPtr& spec) {
    GridFrameAlgebra out{GridHamiltonian(3), GridHamiltonian(3)};
    out.v1 = GridHamiltonian::momentum(3, 0, XPolyGrid::constant(spec, 1.0));
    out.v2 = GridHamiltonian::momentum(3, 1, XPolyGrid::constant(spec, 1.0)) +
             GridHamiltonian::momentum(3, 2, XPolyGrid::x1(spec));
    return out;
}

GridHamiltonian grid_metric_hamiltonian(const GridMetricField& field) {
    auto alg = GridFrameAlgebra::heisenberg(field.spec);
    auto lift = [&](const GridFn& g) {
        return GridHamiltonian::scalar(3, XPolyGrid::from_grid(g));
    };
    return lift(field.a11) * alg.v1 * alg.v1 + lift(field.a12).scaled(2.0) * alg.v1 * alg.v2 +
           lift(field.a22) * alg.v2 * alg.v2;
}

GridHamiltonian grid_reeb_lift(const GridMetricField& field) {
    auto alg = GridFrameAlgebra::heisenberg(field.spec);
    GridHamiltonian delta = GridHamiltonian::scalar(3, XPolyGrid::from_grid(field.delta()));
    GridHamiltonian minus_u = delta * poisson_bracket(alg.v1, alg.v2) +
                              alg.v1 * poisson_bracket(alg.v2, delta) +
                              alg.v2 * poisson_bracket(delta, alg.v1);
    return minus_u.scaled(-1.0);
}

GridVectorField GridVectorField::from_degree_one(const GridHamiltonian& u) {
    GridVectorField out;
    const GridSpecPtr* spec = nullptr;
    for (const auto& [mono, c] : u.terms()) {
        int total = 0, which = -1;
        for (std::size_t i = 0; i < mono.size(); ++i) {
            total += mono[i];
            if (mono[i] == 1) which = static_cast<int>(i);
        }
        if (total != 1) throw std::invalid_argument("expected a degree-1 fiber polynomial");
        out.comp[static_cast<std::size_t>(which)] = c;
        spec = &c.spec();
    }
    if (spec == nullptr) throw std::invalid_argument("zero generator");
    for (auto& c : out.comp)
        if (c.empty() && !c.spec()) c = XPolyGrid::constant(*spec, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                out.comp[static_cast<std::size_t>(i)].derivative(j);
    return out;
}

Eigen::Vector3d GridVectorField::eval(const Eigen::Vector3d& x) const {
    std::array<double, 3> xv{x(0), x(1), x(2)};
    std::span<const double> xs(xv.data(), 3);
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v(i) = comp[static_cast<std::size_t>(i)].eval(xs);
    return v;
}

Eigen::Matrix3d GridVectorField::jacobian(const Eigen::Vector3d& x) const {
    std::array<double, 3> xv{x(0), x(1), x(2)};
    std::span<const double> xs(xv.data(), 3);
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J(i, j) = jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(xs);
    return J;
}

std::pair<GridMetricField, AveragingReport> averaging_step(const GridMetricField& field, double eps,
                                                           const AveragingOptions& opts) {
    if (eps <= 0.0) throw std::invalid_argument("averaging half-width must be positive");
    if (int bad = field.first_indefinite_node(); bad >= 0)
        throw PositivityError("metric coefficients not positive definite at node " + std::to_string(bad));
    GridVectorField ef = GridVectorField::from_degree_one(grid_reeb_lift(field));
    CoreResult core = averaging_core(field, ef, eps, opts);
    double scale = 1.0 / (2.0 * eps);
    GridMetricField out = assemble(field, core, scale);
    AveragingReport report;
    report.epsilon = eps;
    report.quadrature_nodes = opts.quadrature_nodes;
    report.sup_change = out.sup_distance(field);
    report.det_drift_max = core.det_drift_max;
    report.nodes_skipped = core.skipped;
    report.scale_used = scale;
    report.normalization = "mean";
    return {std::move(out), report};
}

std::pair<GridMetricField, AveragingReport> scaled_averaging_step(const GridMetricField& field,
                                                                  double eps, std::optional<double> c_n,
                                                                  const AveragingOptions& opts) {
    if (eps <= 0.0) throw std::invalid_argument("averaging half-width must be positive");
    if (int bad = field.first_indefinite_node(); bad >= 0)
        throw PositivityError("metric coefficients not positive definite at node " + std::to_string(bad));
    GridVectorField ef = GridVectorField::from_degree_one(grid_reeb_lift(field));
    CoreResult core = averaging_core(field, ef, eps, opts);

    double c;
    std::string policy;
    if (c_n) {
        c = *c_n;
        policy = "explicit";
    } else {
        double max_in = 0.0, max_u = 0.0;
        for (int i = 0; i < field.spec->count(); ++i) {
            auto e = static_cast<Eigen::Index>(i);
            if (core.skip_mask[static_cast<std::size_t>(i)]) continue;
            max_in = std::max(max_in, field.a11.values()(e) + field.a22.values()(e));
            max_u = std::max(max_u, core.u11(e) + core.u22(e));
        }
        c = max_u > 0.0 ? max_in / max_u : 1.0;
        policy = "max-trace";
    }
    GridMetricField out = assemble(field, core, c);
    AveragingReport report;
    report.epsilon = eps;
    report.quadrature_nodes = opts.quadrature_nodes;
    report.sup_change = out.sup_distance(field);
    report.det_drift_max = core.det_drift_max;
    report.nodes_skipped = core.skipped;
    report.scale_used = c;
    report.normalization = policy;
    return {std::move(out), report};
}

double invariance_residual(const GridMetricField& field) {
    GridHamiltonian h = grid_metric_hamiltonian(field);
    GridHamiltonian u = grid_reeb_lift(field);
    GridHamiltonian br = poisson_bracket(u, h);
    auto covs = residual_covectors();
    double sup = 0.0;
    for (int i = 0; i < field.spec->count(); ++i) {
        Eigen::Vector3d q = field.spec->point(i);
        std::array<double, 3> qv{q(0), q(1), q(2)};
        for (const auto& p : covs) {
            std::array<double, 3> pv{p(0), p(1), p(2)};
            sup = std::max(sup, std::abs(br.eval(std::span<const double>(qv.data(), 3),
                                                 std::span<const double>(pv.data(), 3))));
        }
    }
    return sup;
}

double invariance_residual(const Frame2& frame, const MetricCoeffs& A,
                           std::span<const std::array<double, 3>> points) {
    SymbolicHamiltonian h = metric_hamiltonian(frame, A);
    ReebField reeb = reeb_field(frame, A);
    SymbolicHamiltonian br = poisson_bracket(reeb.u_h, h);
    auto covs = residual_covectors();
    double sup = 0.0;
    for (const auto& q : points) {
        for (const auto& p : covs) {
            std::array<double, 3> pv{p(0), p(1), p(2)};
            sup = std::max(sup, std::abs(br.eval(std::span<const double>(q.data(), 3),
                                                 std::span<const double>(pv.data(), 3))));
        }
    }
    return sup;
}

namespace {

double det_drift_along(const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& e,
                       const std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>& jac,
                       const std::function<Eigen::Matrix2d(std::span<const double>)>& metric_at,
                       const std::function<Eigen::Matrix<double, 2, 3>(const Eigen::Vector3d&)>& frame_at,
                       const Eigen::Vector3d& q, double eps) {
    Eigen::Matrix<double, 2, 3> F = frame_at(q);
    Eigen::Matrix2d FFt = F * F.transpose();
    Eigen::Matrix<double, 2, 3> P = FFt.inverse() * F;
    std::array<double, 3> qv{q(0), q(1), q(2)};
    double det0 = metric_at(std::span<const double>(qv.data(), 3)).determinant();
    double drift = 0.0;
    double step = eps / 64.0;
    for (double sgn : {1.0, -1.0}) {
        CotangentTransport tr = transport_along(e, jac, q, sgn * eps, step);
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
            const Eigen::Vector3d& x = tr.points[i];
            std::array<double, 3> xv{x(0), x(1), x(2)};
            Eigen::Matrix2d At = metric_at(std::span<const double>(xv.data(), 3));
            Eigen::Matrix<double, 2, 3> B = frame_at(x) * tr.maps[i];
            Eigen::Matrix2d Gt = P * (B.transpose() * At * B) * P.transpose();
            drift = std::max(drift, std::abs(Gt.determinant() - det0));
        }
    }
    return drift;
}

}  // namespace

double det_transport_check(const GridMetricField& field, const Eigen::Vector3d& q, double eps,
                           TransportGenerator gen) {
    std::function<Eigen::Vector3d(const Eigen::Vector3d&)> e;
    std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> jac;
    if (gen == TransportGenerator::Reeb) {
        auto ef = std::make_shared<GridVectorField>(
            GridVectorField::from_degree_one(grid_reeb_lift(field)));
        e = [ef](const Eigen::Vector3d& x) { return ef->eval(x); };
        jac = [ef](const Eigen::Vector3d& x) { return ef->jacobian(x); };
    } else {
        e = [](const Eigen::Vector3d&) { return Eigen::Vector3d(1.0, 0.0, 0.0); };
        jac = [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero(); };
    }
    auto metric_at = [&field](std::span<const double> x) { return field.interp(x); };
    auto frame_at = [](const Eigen::Vector3d& x) { return frame_rows(x(0)); };
    return det_drift_along(e, jac, metric_at, frame_at, q, eps);
}

double det_transport_check(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q,
                           double eps, TransportGenerator gen) {
    const VectorField& gen_field = gen == TransportGenerator::Reeb
                                       ? reeb_field(frame, A).e
                                       : frame.f1;
    auto jac_exprs = std::make_shared<std::array<ScalarExpr, 9>>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            (*jac_exprs)[static_cast<std::size_t>(3 * i + j)] = gen_field.component(i).diff(j);
    VectorField gcopy = gen_field;
    auto e = [gcopy](const Eigen::Vector3d& x) -> Eigen::Vector3d {
        return gcopy.eval(std::span<const double>(x.data(), 3));
    };
    auto jac = [jac_exprs](const Eigen::Vector3d& x) -> Eigen::Matrix3d {
        Eigen::Matrix3d J;
        std::span<const double> xs(x.data(), 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) J(i, j) = (*jac_exprs)[static_cast<std::size_t>(3 * i + j)].eval(xs);
        return J;
    };
    auto metric_at = [&A](std::span<const double> x) { return A.eval(x); };
    auto frame_at = [&frame](const Eigen::Vector3d& x) {
        Eigen::Matrix<double, 2, 3> F;
        std::span<const double> xs(x.data(), 3);
        F.row(0) = frame.f1.eval(xs).transpose();
        F.row(1) = frame.f2.eval(xs).transpose();
        return F;
    };
    return det_drift_along(e, jac, metric_at, frame_at, q, eps);
}

HeatRhs heat_rhs(const GridMetricField& field) {
    GridHamiltonian h = grid_metric_hamiltonian(field);
    GridHamiltonian u = grid_reeb_lift(field);
    GridHamiltonian r = poisson_bracket(u, poisson_bracket(u, h));

    const GridSpec& spec = *field.spec;
    int n = spec.count();
    // Plane values of each degree-2 monomial coefficient; grid nodes lie
    // on the plane, so the polynomial offset part drops out.
    std::map<std::array<int, 2>, Eigen::ArrayXd> quad;  // (i<=j) -> values
    for (const auto& [mono, c] : r.terms()) {
        int total = mono[0] + mono[1] + mono[2];
        if (total != 2) throw NumericalError("heat generator not fiberwise quadratic");
        std::array<int, 2> key{-1, -1};
        int slot = 0;
        for (int i = 0; i < 3; ++i)
            for (int rep = 0; rep < mono[static_cast<std::size_t>(i)]; ++rep) key[static_cast<std::size_t>(slot++)] = i;
        quad[key] = c.plane_part().values();
    }

    Eigen::Matrix<double, 2, 3> P = frame_pinv(spec.origin[0]);
    Eigen::ArrayXd b11(n), b12(n), b22(n);
    for (int idx = 0; idx < n; ++idx) {
        Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
        for (const auto& [key, vals] : quad) {
            double v = vals(idx);
            if (key[0] == key[1]) {
                Q(key[0], key[0]) += v;
            } else {
                Q(key[0], key[1]) += 0.5 * v;
                Q(key[1], key[0]) += 0.5 * v;
            }
        }
        Eigen::Matrix2d b = P * Q * P.transpose();
        b11(idx) = b(0, 0);
        b12(idx) = 0.5 * (b(0, 1) + b(1, 0));
        b22(idx) = b(1, 1);
    }
    return HeatRhs{GridFn(field.spec, std::move(b11)), GridFn(field.spec, std::move(b12)),
                   GridFn(field.spec, std::move(b22))};
}

namespace {

double stability_limit(const GridMetricField& field, double s) {
    const GridSpec& spec = *field.spec;
    double dz = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a)
        if (spec.shape[static_cast<std::size_t>(a)] > 1) dz = std::min(dz, spec.spacing(a));
    if (!std::isfinite(dz)) throw std::invalid_argument("heat flow needs at least one resolved axis");
    double max_delta = field.delta().values().maxCoeff();
    if (max_delta <= 0.0) throw PositivityError("metric determinant not positive");
    return s * dz * dz / max_delta;
}

}  // namespace

HeatResult evolve_heat(const GridMetricField& field, double c, double T, double dt,
                       const HeatOptions& opts) {
    if (dt <= 0.0 || T < 0.0) throw std::invalid_argument("need dt > 0 and T >= 0");
    if (dt > stability_limit(field, opts.stability_factor))
        throw std::invalid_argument("time step exceeds the stability bound s*dz^2/max(det A)");
    if (int bad = field.first_indefinite_node(); bad >= 0)
        throw PositivityError("initial metric not positive definite at node " + std::to_string(bad));

    int nsteps = static_cast<int>(std::ceil(T / dt - 1e-12));
    HeatResult res{field, 0, false, {}};
    int record_stride = std::max(1, nsteps / 16);
    if (opts.record_residuals) res.residual_history.push_back(invariance_residual(res.field));

    auto rhs = [&](const GridMetricField& f) { return heat_rhs(f); };
    auto advance = [&](const GridMetricField& f, const HeatRhs& k, double h) {
        GridMetricField g = f;
        g.a11.values() += h * c * k.b11.values();
        g.a12.values() += h * c * k.b12.values();
        g.a22.values() += h * c * k.b22.values();
        return g;
    };

    for (int i = 0; i < nsteps; ++i) {
        double h = std::min(dt, T - i * dt);
        HeatRhs k1 = rhs(res.field);
        HeatRhs k2 = rhs(advance(res.field, k1, 0.5 * h));
        HeatRhs k3 = rhs(advance(res.field, k2, 0.5 * h));
        HeatRhs k4 = rhs(advance(res.field, k3, h));
        GridMetricField next = res.field;
        next.a11.values() += (h * c / 6.0) * (k1.b11.values() + 2.0 * k2.b11.values() +
                                              2.0 * k3.b11.values() + k4.b11.values());
        next.a12.values() += (h * c / 6.0) * (k1.b12.values() + 2.0 * k2.b12.values() +
                                              2.0 * k3.b12.values() + k4.b12.values());
        next.a22.values() += (h * c / 6.0) * (k1.b22.values() + 2.0 * k2.b22.values() +
                                              2.0 * k3.b22.values() + k4.b22.values());
        if (!next.a11.values().allFinite() || !next.a12.values().allFinite() ||
            !next.a22.values().allFinite())
            throw NumericalError("non-finite metric during heat evolution");
        res.steps_taken = i + 1;
        if (next.first_indefinite_node() >= 0) {
            next.generalized = true;
            res.field = std::move(next);
            res.halted_rank_drop = true;
            break;
        }
        res.field = std::move(next);
        if (opts.record_residuals && ((i + 1) % record_stride == 0 || i + 1 == nsteps))
            res.residual_history.push_back(invariance_residual(res.field));
    }
    return res;
}

}  // namespace srlab
