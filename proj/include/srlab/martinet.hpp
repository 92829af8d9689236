#pragma once

#include <optional>

#include "srlab/bvp.hpp"
#include "srlab/catalog.hpp"

namespace srlab {

/// The flat structure with f1 = ∂x1, f2 = ∂x2 + x1²∂x3 and the frame
/// declared orthonormal; base point at the origin.
struct MartinetStructure {
    Frame2 frame;
    MetricCoeffs A;
    Eigen::Vector3d q0{0.0, 0.0, 0.0};

    static MartinetStructure flat();
};

/// Zero set of φ = det(f1, f2, [f1, f2]) sampled over the cube
/// [-halfwidth, halfwidth]^3: zero crossings of φ along axis-1 grid lines,
/// located by linear interpolation.
std::vector<Eigen::Vector3d> martinet_surface(const Frame2& frame, double halfwidth, int resolution);

/// Integral curve of the line field Δ ∩ TN starting on the surface.
/// Throws std::invalid_argument when |φ(q_start)| exceeds surface_tol.
std::vector<Eigen::Vector3d> singular_curve(const Frame2& frame, const Eigen::Vector3d& q_start,
                                            double T, double step = 1e-2,
                                            double surface_tol = 1e-6);

double sr_distance(const Eigen::Vector3d& q1, const BvpOptions& opts = {});

struct CutProbeReport {
    BvpReport bvp;
    /// Length of the singular candidate when q1 lies on the singular curve
    /// through the origin (the x2 axis).
    std::optional<double> singular_length;
};

CutProbeReport cut_locus_probe(const Eigen::Vector3d& q1, const BvpOptions& opts = {});

struct SphereSample {
    int i_theta = 0, i_psi = 0;
    double theta = 0.0, psi = 0.0;
    Eigen::Vector3d p0{0, 0, 0};
    Eigen::Vector3d endpoint{0, 0, 0};
    bool minimal = false;
    bool locus = false;
};

struct SphereOptions {
    int n_theta = 96;
    int n_psi = 96;
    double psi_cap_fraction = 1.0 - 1.0 / 96.0;  // of π/2
    double lambda_scale = 0.0;                   // 0 = auto (1/r²)
    int steps_per_shot = 128;
    double rho = 0.0;                            // 0 = auto (0.02 r)
    double time_margin_factor = 2.0;             // τ = factor · ρ
    double midpoint_separation = 3.0;            // in units of ρ, for the two-basin test
    int threads = 0;
};

struct SphereSampleSet {
    double radius = 0.0;
    int n_theta = 0, n_psi = 0;
    std::vector<SphereSample> samples;
    int smooth_components = 0;
    int locus_loops = 0;
    std::vector<Eigen::Vector3d> locus_polyline;  // largest loop, in chained order
    bool resolution_ok = true;
    std::string note;
};

SphereSampleSet sphere_sample(double r, const SphereOptions& opts = {});

}  // namespace srlab
