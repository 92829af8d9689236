#pragma once

#include <optional>

#include "srlab/fiber_poly.hpp"
#include "srlab/flow.hpp"
#include "srlab/grid_field.hpp"
#include "srlab/hamiltonian.hpp"

namespace srlab {

using GridHamiltonian = FiberPoly<XPolyGrid>;

/// Momentum lifts v1, v2 of the Heisenberg frame over the grid chart, the
/// lift of [f1,f2], and the metric Hamiltonian of a sampled field.
struct GridFrameAlgebra {
    GridHamiltonian v1, v2;
    static GridFrameAlgebra heisenberg(const GridSpecPtr& spec);
};

GridHamiltonian grid_metric_hamiltonian(const GridMetricField& field);

/// The Reeb lift on the grid, from the determinant identity
/// -u_h = δ{v1,v2} + v1{v2,δ} + v2{δ,v1} with δ = det A.
GridHamiltonian grid_reeb_lift(const GridMetricField& field);

/// Components and Jacobian of the Reeb field extracted from a degree-1
/// grid Hamiltonian; evaluable off the grid plane.
struct GridVectorField {
    std::array<XPolyGrid, 3> comp;
    std::array<std::array<XPolyGrid, 3>, 3> jac;

    static GridVectorField from_degree_one(const GridHamiltonian& u);

    Eigen::Vector3d eval(const Eigen::Vector3d& x) const;
    Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const;
};

struct AveragingReport {
    double epsilon = 0.0;
    int quadrature_nodes = 0;
    double sup_change = 0.0;       // ||h_{n+1} - h_n|| over coefficients
    double det_drift_max = 0.0;    // max_t |det H^t - det H^0| over nodes
    int nodes_skipped = 0;
    double scale_used = 0.0;       // c_n actually applied
    std::string normalization = "mean";
};

struct AveragingOptions {
    int quadrature_nodes = 9;
    double orbit_step_fraction = 1.0 / 16.0;  // integrator step = fraction * epsilon
    int threads = 0;
};

/// One step of the discrete partial averaging of the metric Hamiltonian
/// along the Reeb flow: per node, pull the fiber quadratic form of h_n
/// back through the cotangent transport over t in [-eps, eps] and average
/// with Gauss-Legendre quadrature.
std::pair<GridMetricField, AveragingReport> averaging_step(const GridMetricField& field, double eps,
                                                           const AveragingOptions& opts = {});

/// Scaled variant h_{n+1} = c_n * (unnormalized integral). When c_n is not
/// given it is chosen to preserve the grid maximum of trace A.
std::pair<GridMetricField, AveragingReport> scaled_averaging_step(
    const GridMetricField& field, double eps, std::optional<double> c_n = std::nullopt,
    const AveragingOptions& opts = {});

/// sup over grid nodes and 8 deterministic pseudo-random unit fiber
/// covectors of |{u_h, h}|.
double invariance_residual(const GridMetricField& field);

/// Symbolic counterpart for catalog structures, sampled at given points.
double invariance_residual(const Frame2& frame, const MetricCoeffs& A,
                           std::span<const std::array<double, 3>> points);

enum class TransportGenerator { Reeb, Frame1 };

/// max_t |det H^t - det H^0| where H^t is the transported fiber form on
/// Δ*_q expressed through the t=0 form. Frame1 transports along f1
/// instead of the Reeb field (negative control).
double det_transport_check(const GridMetricField& field, const Eigen::Vector3d& q, double eps,
                           TransportGenerator gen = TransportGenerator::Reeb);
double det_transport_check(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q,
                           double eps, TransportGenerator gen = TransportGenerator::Reeb);

/// Coefficient derivatives of the heat-along-the-Reeb-field equation
/// ∂h/∂t = {u_h, {u_h, h}} (c = 1), restricted to the grid plane.
struct HeatRhs {
    GridFn b11, b12, b22;
};
HeatRhs heat_rhs(const GridMetricField& field);

struct HeatOptions {
    double stability_factor = 0.25;  // dt <= s * dz^2 / max δ (documented s)
    bool record_residuals = true;
    int threads = 0;
};

struct HeatResult {
    GridMetricField field;
    int steps_taken = 0;
    bool halted_rank_drop = false;
    std::vector<double> residual_history;  // invariance residual per recorded step
};

/// Explicit classical 4th-order time stepping of the heat flow with a
/// per-step positive-definiteness check; halts and flags the output as a
/// generalized metric on rank drop.
HeatResult evolve_heat(const GridMetricField& field, double c, double T, double dt,
                       const HeatOptions& opts = {});

}  // namespace srlab
