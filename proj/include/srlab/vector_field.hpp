#pragma once

#include <Eigen/Dense>
#include <vector>

#include "srlab/expr.hpp"

namespace srlab {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Chart vector field with ScalarExpr components.
class VectorField {
public:
    VectorField(int dimension, std::vector<ScalarExpr> components)
        : dim_(dimension), comps_(std::move(components)) {
        if (static_cast<int>(comps_.size()) != dim_)
            throw DimensionMismatch("component count must equal chart dimension");
    }

    static VectorField zero(int dimension) {
        return VectorField(dimension, std::vector<ScalarExpr>(static_cast<std::size_t>(dimension)));
    }

    /// Coordinate field ∂/∂x_{index0+1}.
    static VectorField coordinate(int dimension, int index0) {
        auto v = zero(dimension);
        v.comps_[static_cast<std::size_t>(index0)] = ScalarExpr::constant(1.0);
        return v;
    }

    int dimension() const { return dim_; }
    const ScalarExpr& component(int i) const { return comps_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarExpr>& components() const { return comps_; }

    Eigen::VectorXd eval(std::span<const double> x) const {
        Eigen::VectorXd out(dim_);
        for (int i = 0; i < dim_; ++i) out(i) = comps_[static_cast<std::size_t>(i)].eval(x);
        return out;
    }

    /// Jacobian J_ij = ∂F^i/∂x_j evaluated at x.
    Eigen::MatrixXd jacobian(std::span<const double> x) const {
        Eigen::MatrixXd J(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                J(i, j) = comps_[static_cast<std::size_t>(i)].diff(j).eval(x);
        return J;
    }

    /// Directional derivative of a scalar expression along this field.
    ScalarExpr apply(const ScalarExpr& f) const {
        ScalarExpr out = ScalarExpr::constant(0.0);
        for (int i = 0; i < dim_; ++i) out = out + comps_[static_cast<std::size_t>(i)] * f.diff(i);
        return out;
    }

private:
    int dim_;
    std::vector<ScalarExpr> comps_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const ScalarExpr& c, const VectorField& f);

/// [F,G]^j = Σ_k F^k ∂_k G^j − G^k ∂_k F^j, symbolically exact.
VectorField lie_bracket(const VectorField& F, const VectorField& G);

/// Ordered distribution-spanning pair on a 3-dimensional chart.
struct Frame2 {
    VectorField f1;
    VectorField f2;
    int orientation = +1;  // sign of the declared area orientation of Δ

    Frame2(VectorField f1_, VectorField f2_, int orientation_ = +1)
        : f1(std::move(f1_)), f2(std::move(f2_)), orientation(orientation_) {
        if (f1.dimension() != 3 || f2.dimension() != 3)
            throw DimensionMismatch("Frame2 requires dimension 3");
        if (orientation != 1 && orientation != -1)
            throw std::invalid_argument("orientation must be +1 or -1");
    }
};

struct RankAmbiguity {
    bool ambiguous = false;
    double smallest_retained = 0.0;
    double threshold = 0.0;
};

/// dim n_k(q): rank of the stacked values of all iterated brackets of
/// length <= k at q. Singular values below 1e-8 x largest count as zero.
int bracket_flag_dim(const Frame2& frame, std::span<const double> q, int k,
                     RankAmbiguity* ambiguity = nullptr);

}  // namespace srlab
