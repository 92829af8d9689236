#pragma once

#include <optional>

#include "srlab/fiber_poly.hpp"
#include "srlab/vector_field.hpp"

namespace srlab {

struct ContactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coefficient matrix A(q) of the dual inner product on Δ*: the metric
/// Hamiltonian is h = a11 v1^2 + 2 a12 v1 v2 + a22 v2^2. When the user
/// holds the Gram matrix of the frame instead, invert it first (see
/// MetricCoeffs::from_gram).
struct MetricCoeffs {
    ScalarExpr a11, a12, a22;

    MetricCoeffs(ScalarExpr a11_, ScalarExpr a12_, ScalarExpr a22_)
        : a11(std::move(a11_)), a12(std::move(a12_)), a22(std::move(a22_)) {}

    static MetricCoeffs identity() {
        return MetricCoeffs(ScalarExpr::constant(1.0), ScalarExpr::constant(0.0), ScalarExpr::constant(1.0));
    }

    /// 2x2 cofactor inverse: dual coefficients from the primal Gram matrix.
    static MetricCoeffs from_gram(const MetricCoeffs& gram) {
        ScalarExpr d = gram.a11 * gram.a22 - gram.a12 * gram.a12;
        return MetricCoeffs(gram.a22 / d, -(gram.a12 / d), gram.a11 / d);
    }

    ScalarExpr delta() const { return a11 * a22 - a12 * a12; }

    Eigen::Matrix2d eval(std::span<const double> q) const {
        Eigen::Matrix2d A;
        A(0, 0) = a11.eval(q);
        A(0, 1) = A(1, 0) = a12.eval(q);
        A(1, 1) = a22.eval(q);
        return A;
    }
};

/// Covector field annihilating the frame's distribution, normalized so
/// that dω restricted to Δ is the metric area form.
struct ContactForm {
    std::vector<ScalarExpr> omega;  // 3 components

    Eigen::Vector3d eval(std::span<const double> q) const {
        Eigen::Vector3d w;
        for (int i = 0; i < 3; ++i) w(i) = omega[static_cast<std::size_t>(i)].eval(q);
        return w;
    }

    double pair(const VectorField& X, std::span<const double> q) const {
        return eval(q).dot(X.eval(q));
    }

    /// dω(X,Y) at q, via the coordinate expression of the exterior derivative.
    double d_omega(const VectorField& X, const VectorField& Y, std::span<const double> q) const;
};

struct ReebField {
    VectorField e;
    SymbolicHamiltonian u_h;  // degree-1 lift <ξ, e(q)>
};

/// Degree-1 element Σ_i F^i(q) p_i.
SymbolicHamiltonian hamiltonian_lift(const VectorField& F);

/// Eq-style metric Hamiltonian h = a11 v1^2 + 2a12 v1 v2 + a22 v2^2 built
/// from the dual coefficient matrix. Positive definiteness is spot-checked
/// at `check_points` when given (a11 > 0 and det A > 0).
SymbolicHamiltonian metric_hamiltonian(const Frame2& frame, const MetricCoeffs& A,
                                       std::span<const std::array<double, 3>> check_points = {});

/// Same Hamiltonian scaled by 1/2; with h = 1 on the initial covector its
/// flow is the unit-speed geodesic flow, so length equals duration.
SymbolicHamiltonian geodesic_hamiltonian(const Frame2& frame, const MetricCoeffs& A);

/// Unique Δ-annihilating form with dω(f1', f2') = 1 for oriented
/// orthonormal frames of the metric. Throws ContactError if the contact
/// condition fails at any of `check_points`.
ContactForm normalized_contact_form(const Frame2& frame, const MetricCoeffs& A,
                                    std::span<const std::array<double, 3>> check_points = {});

/// Reeb field: per-point solution of <ω,e> = 1, dω(e,f1) = dω(e,f2) = 0,
/// solved symbolically by Cramer's rule, with its Hamiltonian lift.
ReebField reeb_field(const Frame2& frame, const MetricCoeffs& A,
                     std::span<const std::array<double, 3>> check_points = {});

/// The lift of the Reeb field from the bracket identity
/// -u_h = δ{v1,v2} + v1{v2,δ} + v2{δ,v1}, valid for frames satisfying the
/// Heisenberg relations {v1,{v1,v2}} = {v2,{v2,v1}} = 0 (verified here,
/// symbolically when possible and numerically otherwise).
SymbolicHamiltonian reeb_lift_formula(const Frame2& frame, const MetricCoeffs& A);

/// Zero iff the frame generates a Heisenberg Lie algebra.
bool heisenberg_relations_hold(const Frame2& frame, double tol = 1e-12);

}  // namespace srlab
