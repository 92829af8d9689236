#pragma once

#include <functional>

#include "srlab/flow.hpp"

namespace srlab {

/// Small dense Levenberg-Marquardt with forward-difference Jacobians.
/// Deterministic for identical inputs.
struct LmOptions {
    int max_iterations = 60;
    double residual_tolerance = 1e-10;  // on squared norm decrease stall
    double fd_step = 1e-7;
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

LmResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             Eigen::VectorXd x0, const LmOptions& opts = {});

struct BvpSolution {
    Eigen::Vector3d p0;          // initial covector, normalized to h = 1
    double duration = 0.0;       // equals the path length (unit-speed run)
    double terminal_error = 0.0;
    double length = 0.0;
    bool converged = false;
    int restart_index = 0;
};

struct BvpOptions {
    int restarts = 64;           // even; samples come in mirrored pairs
    std::uint64_t seed = 0;
    double step = 2e-3;          // integrator step
    double max_duration = 6.0;   // 3x the chart diameter at desk scale
    double terminal_tolerance = 1e-7;
    double dedup_radius = 1e-3;  // relative in p0 plus absolute in T
    double lambda_scale = 10.0;  // transversal momentum warp scale
    int threads = 0;
};

struct BvpReport {
    std::vector<BvpSolution> solutions;  // distinct converged, restart order
    double distance = std::numeric_limits<double>::infinity();
    int multiplicity = 0;                // length-minimal within 1e-5
    int converged_restarts = 0;
};

/// Multi-start shooting for sub-Riemannian geodesics between q0 and q1 on
/// the structure (frame, A). Initial covectors are normalized to h = 1
/// (unit speed), so duration = length; the duration is an unknown of the
/// least-squares problem.
BvpReport solve_geodesic_bvp(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q0,
                             const Eigen::Vector3d& q1, const BvpOptions& opts = {});

}  // namespace srlab
