#include "srlab/grid_field.hpp"

#include <cmath>

namespace srlab {

GridFn GridFn::sample(GridSpecPtr spec, const ScalarExpr& e) {
    Eigen::ArrayXd v(spec->count());
    for (int idx = 0; idx < spec->count(); ++idx) {
        Eigen::Vector3d p = spec->point(idx);
        v(idx) = e.eval(std::span<const double>(p.data(), 3));
    }
    return GridFn(std::move(spec), std::move(v));
}

GridFn GridFn::combine(const GridFn& a, const GridFn& b, double sign) {
    if (!a.valid()) return sign > 0 ? b : b.scaled(-1.0);
    if (!b.valid()) return a;
    if (!(*a.spec_ == *b.spec_)) throw std::invalid_argument("grid spec mismatch");
    return GridFn(a.spec_, a.values_ + sign * b.values_);
}

GridFn operator*(const GridFn& a, const GridFn& b) {
    if (!a.valid() || !b.valid()) return GridFn();
    if (!(*a.spec() == *b.spec())) throw std::invalid_argument("grid spec mismatch");
    return GridFn(a.spec(), a.values() * b.values());
}

namespace {

// Line-wise complex DFT utilities along one axis (O(N^2), desk-scale N).
void axis_lines(const GridSpec& spec, int axis, std::vector<std::vector<int>>& lines) {
    lines.clear();
    std::array<int, 3> s = spec.shape;
    int n = s[static_cast<std::size_t>(axis)];
    std::array<int, 2> others{};
    int oi = 0;
    for (int a = 0; a < 3; ++a)
        if (a != axis) others[static_cast<std::size_t>(oi++)] = a;
    for (int u = 0; u < s[static_cast<std::size_t>(others[0])]; ++u) {
        for (int v = 0; v < s[static_cast<std::size_t>(others[1])]; ++v) {
            std::vector<int> line(static_cast<std::size_t>(n));
            for (int w = 0; w < n; ++w) {
                std::array<int, 3> ijk{};
                ijk[static_cast<std::size_t>(axis)] = w;
                ijk[static_cast<std::size_t>(others[0])] = u;
                ijk[static_cast<std::size_t>(others[1])] = v;
                line[static_cast<std::size_t>(w)] = spec.flat(ijk[0], ijk[1], ijk[2]);
            }
            lines.push_back(std::move(line));
        }
    }
}

// Spectral derivative of one periodic sample line, via the DFT with the
// Nyquist mode's derivative set to zero.
std::vector<double> spectral_derivative_line(const std::vector<double>& f, double length) {
    const int n = static_cast<int>(f.size());
    const double two_pi = 6.283185307179586477;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    // remove the mean first: the k >= 1 sums are then exact zeros for
    // constant lines, which keeps constant metrics exact fixed points of
    // the heat evolution (the linearization is not damping in every
    // channel, so a roundoff seed here would get amplified)
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= n;
    for (int k = 1; k <= n / 2; ++k) {
        if (2 * k == n) continue;  // Nyquist
        double ar = 0.0, ai = 0.0;
        for (int j = 0; j < n; ++j) {
            double ang = two_pi * k * j / n;
            ar += (f[static_cast<std::size_t>(j)] - mean) * std::cos(ang);
            ai -= (f[static_cast<std::size_t>(j)] - mean) * std::sin(ang);
        }
        ar *= 2.0 / n;
        ai *= 2.0 / n;
        double kk = two_pi * k / length;
        for (int j = 0; j < n; ++j) {
            double ang = two_pi * k * j / n;
            // d/dx [ar cos(kx) − ai' ...] assembled directly:
            out[static_cast<std::size_t>(j)] +=
                kk * (-ar * std::sin(ang) - ai * std::cos(ang));
        }
    }
    return out;
}

double cardinal_weight(int n, double u) {
    // u = scaled offset in grid radians; weight of node j at offset u.
    // both branches below are 2π-periodic in u (numerator and denominator
    // flip sign together for odd n), so any full-period offset is the node
    if (std::abs(std::remainder(u, 6.283185307179586477)) < 1e-14) return 1.0;
    if (n % 2 == 0) return std::sin(0.5 * n * u) / (n * std::tan(0.5 * u));
    return std::sin(0.5 * n * u) / (n * std::sin(0.5 * u));
}

}  // namespace

GridFn GridFn::derivative(int axis) const {
    if (!valid()) return GridFn();
    int n = spec_->shape[static_cast<std::size_t>(axis)];
    if (n == 1) return GridFn::constant(spec_, 0.0);
    std::vector<std::vector<int>> lines;
    axis_lines(*spec_, axis, lines);
    Eigen::ArrayXd out(values_.size());
    for (const auto& line : lines) {
        std::vector<double> f(line.size());
        for (std::size_t j = 0; j < line.size(); ++j) f[j] = values_(line[j]);
        std::vector<double> d = spectral_derivative_line(f, spec_->length[static_cast<std::size_t>(axis)]);
        for (std::size_t j = 0; j < line.size(); ++j) out(line[j]) = d[j];
    }
    return GridFn(spec_, std::move(out));
}

double GridFn::interp(std::span<const double> x) const {
    const auto& s = *spec_;
    std::array<std::vector<double>, 3> w;
    for (int axis = 0; axis < 3; ++axis) {
        int n = s.shape[static_cast<std::size_t>(axis)];
        w[static_cast<std::size_t>(axis)].resize(static_cast<std::size_t>(n));
        if (n == 1) {
            w[static_cast<std::size_t>(axis)][0] = 1.0;
            continue;
        }
        double L = s.length[static_cast<std::size_t>(axis)];
        for (int j = 0; j < n; ++j) {
            double u = 6.283185307179586477 *
                       (x[static_cast<std::size_t>(axis)] - s.coordinate(axis, j)) / L;
            w[static_cast<std::size_t>(axis)][static_cast<std::size_t>(j)] = cardinal_weight(n, u);
        }
    }
    double acc = 0.0;
    for (int i = 0; i < s.shape[0]; ++i)
        for (int j = 0; j < s.shape[1]; ++j)
            for (int k = 0; k < s.shape[2]; ++k)
                acc += w[0][static_cast<std::size_t>(i)] * w[1][static_cast<std::size_t>(j)] *
                       w[2][static_cast<std::size_t>(k)] * values_(s.flat(i, j, k));
    return acc;
}

void XPolyGrid::trim() {
    while (!coeffs_.empty() && (!coeffs_.back().valid() || coeffs_.back().max_abs() == 0.0))
        coeffs_.pop_back();
}

XPolyGrid XPolyGrid::derivative(int axis) const {
    if (empty()) return XPolyGrid();
    std::vector<GridFn> out;
    if (axis == 0) {
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            out.push_back(coeffs_[k].scaled(static_cast<double>(k)));
    } else {
        for (const auto& c : coeffs_) out.push_back(c.derivative(axis));
    }
    return XPolyGrid(spec_, std::move(out));
}

double XPolyGrid::eval(std::span<const double> x) const {
    if (empty()) return 0.0;
    double xi = x[0] - spec_->origin[0];
    double acc = 0.0;
    double pw = 1.0;
    for (const auto& c : coeffs_) {
        acc += c.interp(x) * pw;
        pw *= xi;
    }
    return acc;
}

XPolyGrid operator+(const XPolyGrid& a, const XPolyGrid& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<GridFn> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        GridFn lhs = k < a.coeffs_.size() ? a.coeffs_[k] : GridFn();
        GridFn rhs = k < b.coeffs_.size() ? b.coeffs_[k] : GridFn();
        out[k] = lhs + rhs;
    }
    return XPolyGrid(a.spec_ ? a.spec_ : b.spec_, std::move(out));
}

XPolyGrid operator-(const XPolyGrid& a, const XPolyGrid& b) { return a + b.scaled(-1.0); }

XPolyGrid operator*(const XPolyGrid& a, const XPolyGrid& b) {
    if (a.empty() || b.empty()) return XPolyGrid();
    std::vector<GridFn> out(a.coeffs_.size() + b.coeffs_.size() - 1);
    auto spec = a.spec_ ? a.spec_ : b.spec_;
    for (auto& c : out) c = GridFn::constant(spec, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] = out[i + j] + a.coeffs_[i] * b.coeffs_[j];
    return XPolyGrid(spec, std::move(out));
}

XPolyGrid XPolyGrid::scaled(double s) const {
    std::vector<GridFn> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(c.scaled(s));
    return XPolyGrid(spec_, std::move(out));
}

XPolyGrid coeff_derivative(const XPolyGrid& c, int axis) { return c.derivative(axis); }
bool coeff_is_zero(const XPolyGrid& c) { return c.empty(); }
XPolyGrid coeff_scale(const XPolyGrid& c, double s) { return c.scaled(s); }

GridMetricField GridMetricField::sample(GridSpecPtr spec, const ScalarExpr& a11, const ScalarExpr& a12,
                                        const ScalarExpr& a22) {
    GridMetricField f;
    f.spec = spec;
    f.a11 = GridFn::sample(spec, a11);
    f.a12 = GridFn::sample(spec, a12);
    f.a22 = GridFn::sample(spec, a22);
    return f;
}

int GridMetricField::first_indefinite_node(double tol) const {
    for (int idx = 0; idx < spec->count(); ++idx) {
        double d = a11.values()(idx) * a22.values()(idx) - a12.values()(idx) * a12.values()(idx);
        if (!(a11.values()(idx) > tol) || !(d > tol)) return idx;
    }
    return -1;
}

double GridMetricField::sup_distance(const GridMetricField& other) const {
    return std::max({(a11 - other.a11).max_abs(), (a12 - other.a12).max_abs(),
                     (a22 - other.a22).max_abs()});
}

}  // namespace srlab
