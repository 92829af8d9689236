#pragma once

#include <string>

#include "srlab/hamiltonian.hpp"

namespace srlab {

/// A named contact sub-Riemannian structure: frame plus dual metric
/// coefficients on a 3-dimensional chart.
struct ContactMetric {
    std::string name;
    Frame2 frame;
    MetricCoeffs A;
};

namespace catalog {

/// Heisenberg frame f1 = ∂x1, f2 = ∂x2 + x1 ∂x3.
Frame2 heisenberg_frame();

/// Martinet frame f1 = ∂x1, f2 = ∂x2 + x1^2 ∂x3.
Frame2 martinet_frame();

/// Left-invariant frame of SU(2) in the stereographic chart of the unit
/// quaternions from -1: with r^2 = x1^2 + x2^2 + x3^2,
///   X_a = ((1 - r^2)/2) e_a + x × e_a + (x·e_a) x,  a = 1,2,
/// so that [X1, X2] = 2 X3.
Frame2 su2_frame();

ContactMetric heisenberg_flat();
ContactMetric heisenberg_metric(const MetricCoeffs& A);  // custom coefficients, Heisenberg frame
ContactMetric martinet_flat();
ContactMetric su2_killing();

/// Unimodular z-dependent family A = diag(1 + amp sin x3, 1/(1 + amp sin x3)).
ContactMetric heisenberg_unimodular_z(double amplitude = 0.3);

/// Resolve by name: "heisenberg-flat", "martinet-flat", "su2-killing",
/// "heisenberg(a11; a12; a22)" with expressions in the x1..x3 grammar.
ContactMetric by_name(const std::string& name);

}  // namespace catalog

}  // namespace srlab
