#include "srlab/vector_field.hpp"

#include <Eigen/SVD>

namespace srlab {

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatch("vector field dimensions differ");
    std::vector<ScalarExpr> c;
    c.reserve(static_cast<std::size_t>(a.dimension()));
    for (int i = 0; i < a.dimension(); ++i) c.push_back(a.component(i) + b.component(i));
    return VectorField(a.dimension(), std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatch("vector field dimensions differ");
    std::vector<ScalarExpr> c;
    c.reserve(static_cast<std::size_t>(a.dimension()));
    for (int i = 0; i < a.dimension(); ++i) c.push_back(a.component(i) - b.component(i));
    return VectorField(a.dimension(), std::move(c));
}

VectorField operator*(const ScalarExpr& c, const VectorField& f) {
    std::vector<ScalarExpr> out;
    out.reserve(static_cast<std::size_t>(f.dimension()));
    for (int i = 0; i < f.dimension(); ++i) out.push_back(c * f.component(i));
    return VectorField(f.dimension(), std::move(out));
}

VectorField lie_bracket(const VectorField& F, const VectorField& G) {
    if (F.dimension() != G.dimension()) throw DimensionMismatch("lie_bracket: dimensions differ");
    const int n = F.dimension();
    std::vector<ScalarExpr> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        ScalarExpr s = ScalarExpr::constant(0.0);
        for (int k = 0; k < n; ++k)
            s = s + F.component(k) * G.component(j).diff(k) - G.component(k) * F.component(j).diff(k);
        out.push_back(s);
    }
    return VectorField(n, std::move(out));
}

int bracket_flag_dim(const Frame2& frame, std::span<const double> q, int k, RankAmbiguity* ambiguity) {
    if (k < 1) throw std::invalid_argument("bracket_flag_dim: k must be >= 1");
    const int n = 3;
    // Left-normed brackets span the same flag as arbitrary nestings.
    std::vector<VectorField> level = {frame.f1, frame.f2};
    std::vector<VectorField> all = level;
    for (int len = 2; len <= k; ++len) {
        std::vector<VectorField> next;
        for (const auto& b : level) {
            next.push_back(lie_bracket(frame.f1, b));
            next.push_back(lie_bracket(frame.f2, b));
        }
        level = next;
        all.insert(all.end(), next.begin(), next.end());
    }
    Eigen::MatrixXd M(static_cast<Eigen::Index>(all.size()), n);
    for (std::size_t i = 0; i < all.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = all[i].eval(q).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    double tol = 1e-8 * sv(0);
    int rank = 0;
    double smallest_retained = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) {
            ++rank;
            smallest_retained = sv(i);
        }
    }
    if (ambiguity) {
        ambiguity->threshold = tol;
        ambiguity->smallest_retained = smallest_retained;
        ambiguity->ambiguous = rank > 0 && smallest_retained < 10.0 * tol;
    }
    return rank;
}

}  // namespace srlab
