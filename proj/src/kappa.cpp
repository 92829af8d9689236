#include "srlab/kappa.hpp"

#include <cmath>

namespace srlab {

StructureEvaluator StructureEvaluator::from_metric(const Frame2& frame, const MetricCoeffs& A) {
    auto reeb = std::make_shared<ReebField>(reeb_field(frame, A));
    auto fcopy = std::make_shared<Frame2>(frame);
    auto acopy = std::make_shared<MetricCoeffs>(A);
    StructureEvaluator ev;
    ev.frame = [fcopy](const Eigen::Vector3d& x) {
        Eigen::Matrix<double, 2, 3> F;
        std::span<const double> xs(x.data(), 3);
        F.row(0) = fcopy->f1.eval(xs).transpose();
        F.row(1) = fcopy->f2.eval(xs).transpose();
        return F;
    };
    ev.coeffs = [acopy](const Eigen::Vector3d& x) {
        return acopy->eval(std::span<const double>(x.data(), 3));
    };
    ev.reeb = [reeb](const Eigen::Vector3d& x) -> Eigen::Vector3d {
        return reeb->e.eval(std::span<const double>(x.data(), 3));
    };
    return ev;
}

StructureEvaluator StructureEvaluator::from_grid(const GridMetricField& field) {
    auto ef = std::make_shared<GridVectorField>(GridVectorField::from_degree_one(grid_reeb_lift(field)));
    auto fld = std::make_shared<GridMetricField>(field);
    StructureEvaluator ev;
    ev.frame = [](const Eigen::Vector3d& x) {
        Eigen::Matrix<double, 2, 3> F;
        F << 1.0, 0.0, 0.0, 0.0, 1.0, x(0);
        return F;
    };
    ev.coeffs = [fld](const Eigen::Vector3d& x) {
        std::array<double, 3> xv{x(0), x(1), x(2)};
        return fld->interp(std::span<const double>(xv.data(), 3));
    };
    ev.reeb = [ef](const Eigen::Vector3d& x) { return ef->eval(x); };
    return ev;
}

Eigen::Vector3d disc_metric(const StructureEvaluator& ev, const Eigen::Vector3d& q, double s, double t) {
    Eigen::Matrix<double, 2, 3> F0 = ev.frame(q);
    Eigen::Vector3d qp = q + s * F0.row(0).transpose() + t * F0.row(1).transpose();

    Eigen::Matrix<double, 2, 3> Fp = ev.frame(qp);
    Eigen::Vector3d e = ev.reeb(qp);
    Eigen::Matrix3d B;  // columns f1', f2', e'
    B.col(0) = Fp.row(0).transpose();
    B.col(1) = Fp.row(1).transpose();
    B.col(2) = e;
    Eigen::Matrix3d Binv = B.inverse();

    // Disc tangents are the constant frame vectors of the base point;
    // project along the Reeb direction onto Δ(q').
    Eigen::Vector3d c1 = Binv * F0.row(0).transpose();
    Eigen::Vector3d c2 = Binv * F0.row(1).transpose();
    Eigen::Vector2d a1 = c1.head<2>(), a2 = c2.head<2>();

    Eigen::Matrix2d gram = ev.coeffs(qp).inverse();  // primal inner product on Δ
    return {a1.dot(gram * a1), a1.dot(gram * a2), a2.dot(gram * a2)};
}

double brioschi_curvature(const std::function<Eigen::Vector3d(double, double)>& efg, double h) {
    // 3x3 stencil of (E, F, G)
    Eigen::Vector3d v[3][3];
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) v[i + 1][j + 1] = efg(i * h, j * h);
    auto at = [&](int i, int j) -> const Eigen::Vector3d& { return v[i + 1][j + 1]; };

    double E = at(0, 0)(0), F = at(0, 0)(1), G = at(0, 0)(2);
    double E_u = (at(1, 0)(0) - at(-1, 0)(0)) / (2 * h);
    double E_v = (at(0, 1)(0) - at(0, -1)(0)) / (2 * h);
    double F_u = (at(1, 0)(1) - at(-1, 0)(1)) / (2 * h);
    double F_v = (at(0, 1)(1) - at(0, -1)(1)) / (2 * h);
    double G_u = (at(1, 0)(2) - at(-1, 0)(2)) / (2 * h);
    double G_v = (at(0, 1)(2) - at(0, -1)(2)) / (2 * h);
    double E_vv = (at(0, 1)(0) - 2 * E + at(0, -1)(0)) / (h * h);
    double G_uu = (at(1, 0)(2) - 2 * G + at(-1, 0)(2)) / (h * h);
    double F_uv = (at(1, 1)(1) - at(1, -1)(1) - at(-1, 1)(1) + at(-1, -1)(1)) / (4 * h * h);

    Eigen::Matrix3d M1, M2;
    M1 << -0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v,
          F_v - 0.5 * G_u, E, F,
          0.5 * G_v, F, G;
    M2 << 0.0, 0.5 * E_v, 0.5 * G_u,
          0.5 * E_v, E, F,
          0.5 * G_u, F, G;
    double denom = E * G - F * F;
    return (M1.determinant() - M2.determinant()) / (denom * denom);
}

double kappa_estimate(const StructureEvaluator& ev, const Eigen::Vector3d& q, const KappaOptions& opts) {
    auto efg = [&](double s, double t) { return disc_metric(ev, q, s, t); };
    double kh = brioschi_curvature(efg, opts.fd_step);
    double kh2 = brioschi_curvature(efg, 0.5 * opts.fd_step);
    return (4.0 * kh2 - kh) / 3.0;  // eliminates the O(h^2) central-difference error
}

double kappa_estimate(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q,
                      const KappaOptions& opts) {
    std::vector<std::array<double, 3>> pts;
    pts.push_back({q(0), q(1), q(2)});
    for (int i = 0; i < 3; ++i) {
        for (double d : {-0.1, 0.1}) {
            std::array<double, 3> p{q(0), q(1), q(2)};
            p[static_cast<std::size_t>(i)] += d;
            pts.push_back(p);
        }
    }
    double r = invariance_residual(frame, A, pts);
    if (r > opts.residual_tol) throw KappaPreconditionError(r);
    return kappa_estimate(StructureEvaluator::from_metric(frame, A), q, opts);
}

double kappa_estimate(const GridMetricField& field, const Eigen::Vector3d& q, const KappaOptions& opts) {
    double r = invariance_residual(field);
    if (r > opts.residual_tol) throw KappaPreconditionError(r);
    return kappa_estimate(StructureEvaluator::from_grid(field), q, opts);
}

}  // namespace srlab
