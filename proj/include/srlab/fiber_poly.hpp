#pragma once

#include <map>
#include <span>
#include <vector>

#include "srlab/expr.hpp"

namespace srlab {

inline ScalarExpr coeff_derivative(const ScalarExpr& c, int axis) { return c.diff(axis); }
inline bool coeff_is_zero(const ScalarExpr& c) { return c.is_zero(); }
inline ScalarExpr coeff_scale(const ScalarExpr& c, double s) { return ScalarExpr::constant(s) * c; }

/// Function on T*M, polynomial in the momenta p1..pn with coefficients in
/// the ring R (symbolic expressions, or sampled grid functions). Closed
/// under the canonical Poisson bracket.
template <class R>
class FiberPoly {
public:
    using Monomial = std::vector<int>;  // momentum exponents, length = dim

    explicit FiberPoly(int dimension = 3) : dim_(dimension) {}

    int dimension() const { return dim_; }
    const std::map<Monomial, R>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [mono, c] : terms_) {
            int s = 0;
            for (int e : mono) s += e;
            d = std::max(d, s);
        }
        return d;
    }

    void add_term(const Monomial& mono, const R& c) {
        if (coeff_is_zero(c)) return;
        auto it = terms_.find(mono);
        if (it == terms_.end()) {
            terms_.emplace(mono, c);
        } else {
            it->second = it->second + c;
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    static FiberPoly scalar(int dimension, const R& c) {
        FiberPoly f(dimension);
        f.add_term(Monomial(static_cast<std::size_t>(dimension), 0), c);
        return f;
    }

    static FiberPoly momentum(int dimension, int k, const R& c) {
        FiberPoly f(dimension);
        Monomial m(static_cast<std::size_t>(dimension), 0);
        m[static_cast<std::size_t>(k)] = 1;
        f.add_term(m, c);
        return f;
    }

    friend FiberPoly operator+(const FiberPoly& a, const FiberPoly& b) {
        check_dims(a, b);
        FiberPoly out = a;
        for (const auto& [mono, c] : b.terms_) out.add_term(mono, c);
        return out;
    }

    friend FiberPoly operator-(const FiberPoly& a, const FiberPoly& b) {
        check_dims(a, b);
        FiberPoly out = a;
        for (const auto& [mono, c] : b.terms_) out.add_term(mono, coeff_scale(c, -1.0));
        return out;
    }

    friend FiberPoly operator*(const FiberPoly& a, const FiberPoly& b) {
        check_dims(a, b);
        FiberPoly out(a.dim_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m(ma);
                for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
                out.add_term(m, ca * cb);
            }
        }
        return out;
    }

    FiberPoly scaled(double s) const {
        FiberPoly out(dim_);
        for (const auto& [mono, c] : terms_) out.add_term(mono, coeff_scale(c, s));
        return out;
    }

    FiberPoly momentum_derivative(int k) const {
        FiberPoly out(dim_);
        for (const auto& [mono, c] : terms_) {
            int e = mono[static_cast<std::size_t>(k)];
            if (e == 0) continue;
            Monomial m(mono);
            m[static_cast<std::size_t>(k)] -= 1;
            out.add_term(m, coeff_scale(c, static_cast<double>(e)));
        }
        return out;
    }

    FiberPoly position_derivative(int k) const {
        FiberPoly out(dim_);
        for (const auto& [mono, c] : terms_) out.add_term(mono, coeff_derivative(c, k));
        return out;
    }

    double eval(std::span<const double> q, std::span<const double> p) const {
        double s = 0.0;
        for (const auto& [mono, c] : terms_) {
            double t = c.eval(q);
            for (std::size_t i = 0; i < mono.size(); ++i)
                for (int e = 0; e < mono[i]; ++e) t *= p[i];
            s += t;
        }
        return s;
    }

private:
    static void check_dims(const FiberPoly& a, const FiberPoly& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("fiber polynomial dimensions differ");
    }

    int dim_;
    std::map<Monomial, R> terms_;
};

/// {F,G} = Σ_k ∂F/∂p_k ∂G/∂x_k − ∂F/∂x_k ∂G/∂p_k. With this sign
/// convention {p1, x1} = +1 and lifts intertwine Lie brackets:
/// {v_F, v_G} = v_[F,G].
template <class R>
FiberPoly<R> poisson_bracket(const FiberPoly<R>& F, const FiberPoly<R>& G) {
    if (F.dimension() != G.dimension()) throw std::invalid_argument("poisson_bracket: dimensions differ");
    FiberPoly<R> out(F.dimension());
    for (int k = 0; k < F.dimension(); ++k) {
        out = out + F.momentum_derivative(k) * G.position_derivative(k) -
              F.position_derivative(k) * G.momentum_derivative(k);
    }
    return out;
}

using SymbolicHamiltonian = FiberPoly<ScalarExpr>;

}  // namespace srlab
