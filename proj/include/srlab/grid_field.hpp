#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <span>
#include <vector>

#include "srlab/expr.hpp"

namespace srlab {

/// Periodic chart grid. Axes with more than one node are periodic over
/// [origin, origin + length); singleton axes carry constant data.
struct GridSpec {
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::array<double, 3> length{6.283185307179586477, 6.283185307179586477, 6.283185307179586477};

    int count() const { return shape[0] * shape[1] * shape[2]; }
    double spacing(int axis) const {
        return length[static_cast<std::size_t>(axis)] / shape[static_cast<std::size_t>(axis)];
    }
    double coordinate(int axis, int index) const {
        return origin[static_cast<std::size_t>(axis)] + spacing(axis) * index;
    }
    int flat(int i, int j, int k) const { return (i * shape[1] + j) * shape[2] + k; }
    std::array<int, 3> unflat(int idx) const {
        return {idx / (shape[1] * shape[2]), (idx / shape[2]) % shape[1], idx % shape[2]};
    }
    Eigen::Vector3d point(int idx) const {
        auto ijk = unflat(idx);
        return {coordinate(0, ijk[0]), coordinate(1, ijk[1]), coordinate(2, ijk[2])};
    }
    bool operator==(const GridSpec& other) const {
        return shape == other.shape && origin == other.origin && length == other.length;
    }
};

using GridSpecPtr = std::shared_ptr<const GridSpec>;

/// Sampled function on a periodic grid with spectral (trigonometric)
/// derivative and off-node interpolation.
class GridFn {
public:
    GridFn() = default;
    GridFn(GridSpecPtr spec, Eigen::ArrayXd values) : spec_(std::move(spec)), values_(std::move(values)) {
        if (values_.size() != spec_->count()) throw std::invalid_argument("grid value count mismatch");
    }

    static GridFn constant(GridSpecPtr spec, double v) {
        return GridFn(spec, Eigen::ArrayXd::Constant(spec->count(), v));
    }
    static GridFn sample(GridSpecPtr spec, const ScalarExpr& e);

    bool valid() const { return spec_ != nullptr; }
    const GridSpecPtr& spec() const { return spec_; }
    const Eigen::ArrayXd& values() const { return values_; }
    Eigen::ArrayXd& values() { return values_; }

    GridFn derivative(int axis) const;

    /// Trigonometric interpolation at a chart point (singleton axes ignored).
    double interp(std::span<const double> x) const;

    friend GridFn operator+(const GridFn& a, const GridFn& b) { return combine(a, b, +1.0); }
    friend GridFn operator-(const GridFn& a, const GridFn& b) { return combine(a, b, -1.0); }
    friend GridFn operator*(const GridFn& a, const GridFn& b);
    GridFn scaled(double s) const { return GridFn(spec_, values_ * s); }

    double max_abs() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }

private:
    static GridFn combine(const GridFn& a, const GridFn& b, double sign);
    GridSpecPtr spec_;
    Eigen::ArrayXd values_;
};

/// Coefficient ring for fiber polynomials over a grid chart: polynomials
/// in the x1-offset from the grid plane, with grid-function coefficients.
/// Derivatives along x2/x3 are spectral; the x1 derivative is the formal
/// polynomial one, which keeps nested frame derivatives exact when the
/// grid is singleton along x1.
class XPolyGrid {
public:
    XPolyGrid() = default;
    XPolyGrid(GridSpecPtr spec, std::vector<GridFn> coeffs)
        : spec_(std::move(spec)), coeffs_(std::move(coeffs)) {
        trim();
    }

    static XPolyGrid constant(GridSpecPtr spec, double v) {
        return XPolyGrid(spec, {GridFn::constant(spec, v)});
    }
    static XPolyGrid from_grid(GridFn g) {
        auto spec = g.spec();
        return XPolyGrid(spec, {std::move(g)});
    }
    /// The coordinate function x1 itself.
    static XPolyGrid x1(GridSpecPtr spec) {
        double plane = spec->origin[0];
        return XPolyGrid(spec, {GridFn::constant(spec, plane), GridFn::constant(spec, 1.0)});
    }

    bool empty() const { return coeffs_.empty(); }
    const std::vector<GridFn>& coeffs() const { return coeffs_; }
    const GridSpecPtr& spec() const { return spec_; }

    /// The grid-plane restriction (x1 = plane value), i.e. the degree-0 part.
    GridFn plane_part() const {
        if (coeffs_.empty()) return spec_ ? GridFn::constant(spec_, 0.0) : GridFn();
        return coeffs_[0];
    }

    XPolyGrid derivative(int axis) const;
    double eval(std::span<const double> x) const;

    friend XPolyGrid operator+(const XPolyGrid& a, const XPolyGrid& b);
    friend XPolyGrid operator-(const XPolyGrid& a, const XPolyGrid& b);
    friend XPolyGrid operator*(const XPolyGrid& a, const XPolyGrid& b);
    XPolyGrid scaled(double s) const;

private:
    void trim();
    GridSpecPtr spec_;
    std::vector<GridFn> coeffs_;  // by power of (x1 − plane)
};

XPolyGrid coeff_derivative(const XPolyGrid& c, int axis);
bool coeff_is_zero(const XPolyGrid& c);
XPolyGrid coeff_scale(const XPolyGrid& c, double s);

/// Sampled metric coefficients on a periodic chart grid over the
/// Heisenberg frame; the evolving state of the diffusion dynamics.
struct GridMetricField {
    GridSpecPtr spec;
    GridFn a11, a12, a22;
    bool generalized = false;  // set when evolution halted on rank drop

    static GridMetricField sample(GridSpecPtr spec, const ScalarExpr& a11, const ScalarExpr& a12,
                                  const ScalarExpr& a22);

    GridFn delta() const { return a11 * a22 - a12 * a12; }

    /// Index of the first node where A is not positive definite, or -1.
    int first_indefinite_node(double tol = 0.0) const;

    double sup_distance(const GridMetricField& other) const;

    Eigen::Matrix2d interp(std::span<const double> x) const {
        Eigen::Matrix2d A;
        A(0, 0) = a11.interp(x);
        A(0, 1) = A(1, 0) = a12.interp(x);
        A(1, 1) = a22.interp(x);
        return A;
    }
};

}  // namespace srlab
