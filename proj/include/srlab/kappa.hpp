#pragma once

#include <functional>

#include "srlab/diffusion.hpp"

namespace srlab {

struct KappaPreconditionError : std::runtime_error {
    double residual;
    explicit KappaPreconditionError(double r)
        : std::runtime_error("metric is not Reeb-invariant (residual " + std::to_string(r) + ")"),
          residual(r) {}
};

/// Point evaluators of the geometric data the quotient-surface metric
/// needs: frame rows, dual coefficient matrix, Reeb direction.
struct StructureEvaluator {
    std::function<Eigen::Matrix<double, 2, 3>(const Eigen::Vector3d&)> frame;
    std::function<Eigen::Matrix2d(const Eigen::Vector3d&)> coeffs;
    std::function<Eigen::Vector3d(const Eigen::Vector3d&)> reeb;

    static StructureEvaluator from_metric(const Frame2& frame, const MetricCoeffs& A);
    static StructureEvaluator from_grid(const GridMetricField& field);
};

struct KappaOptions {
    double fd_step = 0.03;        // outer Brioschi step; Richardson uses h and h/2
    double residual_tol = 1e-6;
};

/// First fundamental form (E, F, G) of the local quotient surface at disc
/// coordinates (s, t): point q + s f1(q) + t f2(q), tangents projected
/// onto Δ along the Reeb direction and paired with the primal inner
/// product A^{-1}.
Eigen::Vector3d disc_metric(const StructureEvaluator& ev, const Eigen::Vector3d& q, double s, double t);

/// Gaussian curvature at (0,0) of a parameterized first fundamental form,
/// by the Brioschi formula with central differences of step h.
double brioschi_curvature(const std::function<Eigen::Vector3d(double, double)>& efg, double h);

/// Curvature of the quotient surface through q, Richardson-extrapolated.
/// Callers are responsible for the Reeb-invariance precondition; the
/// wrappers below enforce it.
double kappa_estimate(const StructureEvaluator& ev, const Eigen::Vector3d& q,
                      const KappaOptions& opts = {});

double kappa_estimate(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q,
                      const KappaOptions& opts = {});
double kappa_estimate(const GridMetricField& field, const Eigen::Vector3d& q,
                      const KappaOptions& opts = {});

}  // namespace srlab
