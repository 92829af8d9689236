#include "srlab/flow.hpp"

#include <cmath>

namespace srlab {

HamiltonianFlow::HamiltonianFlow(const SymbolicHamiltonian& H) : dim_(H.dimension()), H_(H) {
    for (int k = 0; k < dim_; ++k) {
        dHdp_.push_back(H.momentum_derivative(k));
        dHdx_.push_back(H.position_derivative(k));
    }
}

double HamiltonianFlow::energy(const Eigen::VectorXd& state) const {
    std::span<const double> q(state.data(), static_cast<std::size_t>(dim_));
    std::span<const double> p(state.data() + dim_, static_cast<std::size_t>(dim_));
    return H_.eval(q, p);
}

Eigen::VectorXd HamiltonianFlow::rhs(const Eigen::VectorXd& state) const {
    std::span<const double> q(state.data(), static_cast<std::size_t>(dim_));
    std::span<const double> p(state.data() + dim_, static_cast<std::size_t>(dim_));
    Eigen::VectorXd out(2 * dim_);
    for (int k = 0; k < dim_; ++k) {
        out(k) = dHdp_[static_cast<std::size_t>(k)].eval(q, p);
        out(dim_ + k) = -dHdx_[static_cast<std::size_t>(k)].eval(q, p);
    }
    return out;
}

Eigen::VectorXd HamiltonianFlow::rk4_step(const Eigen::VectorXd& s, double dt) const {
    Eigen::VectorXd k1 = rhs(s);
    Eigen::VectorXd k2 = rhs(s + 0.5 * dt * k1);
    Eigen::VectorXd k3 = rhs(s + 0.5 * dt * k2);
    Eigen::VectorXd k4 = rhs(s + dt * k3);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory HamiltonianFlow::integrate(const Eigen::VectorXd& xi0, double T, double step,
                                      std::size_t record_every) const {
    if (step <= 0.0) throw std::invalid_argument("step must be positive");
    if (xi0.size() != 2 * dim_) throw DimensionMismatch("state must have size 2n");
    Trajectory traj;
    traj.step = step;
    double h0 = energy(xi0);
    std::size_t nsteps = static_cast<std::size_t>(std::ceil(std::abs(T) / step - 1e-12));
    double dt = nsteps == 0 ? 0.0 : T / static_cast<double>(nsteps);
    Eigen::VectorXd s = xi0;
    traj.times.push_back(0.0);
    traj.states.push_back(s);
    for (std::size_t i = 1; i <= nsteps; ++i) {
        s = rk4_step(s, dt);
        if (!s.allFinite()) throw NumericalError("non-finite state during Hamiltonian integration");
        bool record = record_every != 0 && (i % record_every == 0);
        if (record || i == nsteps) {
            traj.times.push_back(dt * static_cast<double>(i));
            traj.states.push_back(s);
            traj.energy_drift = std::max(traj.energy_drift, std::abs(energy(s) - h0));
        }
    }
    return traj;
}

Trajectory integrate_hamiltonian(const SymbolicHamiltonian& H, const Eigen::VectorXd& xi0, double T,
                                 double step, std::size_t record_every) {
    return HamiltonianFlow(H).integrate(xi0, T, step, record_every);
}

CotangentTransport transport_along(
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& e,
    const std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>& jac, const Eigen::Vector3d& q,
    double t, double step, double box_halfwidth) {
    if (step <= 0.0) throw std::invalid_argument("step must be positive");
    CotangentTransport out;
    out.times.push_back(0.0);
    out.points.push_back(q);
    out.maps.push_back(Eigen::Matrix3d::Identity());
    std::size_t nsteps = static_cast<std::size_t>(std::ceil(std::abs(t) / step - 1e-12));
    if (nsteps == 0) return out;
    double dt = t / static_cast<double>(nsteps);

    // Joint RK4 on (q, M) with Ṁ = −J(q)ᵀ M.
    Eigen::Vector3d x = q;
    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    for (std::size_t i = 1; i <= nsteps; ++i) {
        auto f = [&](const Eigen::Vector3d& xx, const Eigen::Matrix3d& MM) {
            return std::pair<Eigen::Vector3d, Eigen::Matrix3d>(e(xx), -jac(xx).transpose() * MM);
        };
        auto [k1x, k1m] = f(x, M);
        auto [k2x, k2m] = f(x + 0.5 * dt * k1x, M + 0.5 * dt * k1m);
        auto [k3x, k3m] = f(x + 0.5 * dt * k2x, M + 0.5 * dt * k2m);
        auto [k4x, k4m] = f(x + dt * k3x, M + dt * k3m);
        x = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        M = M + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        if (!x.allFinite() || !M.allFinite()) throw NumericalError("non-finite transport state");
        if (box_halfwidth > 0.0 && ((x - q).cwiseAbs().maxCoeff() > box_halfwidth))
            throw DomainExitError("orbit left the declared domain box");
        out.times.push_back(dt * static_cast<double>(i));
        out.points.push_back(x);
        out.maps.push_back(M);
    }
    return out;
}

CotangentTransport reeb_transport(const Frame2& frame, const MetricCoeffs& A,
                                  const Eigen::Vector3d& q, double t, double step,
                                  double box_halfwidth) {
    ReebField reeb = reeb_field(frame, A);
    auto jac_exprs = std::make_shared<std::array<ScalarExpr, 9>>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            (*jac_exprs)[static_cast<std::size_t>(3 * i + j)] = reeb.e.component(i).diff(j);
    auto e_eval = [reeb](const Eigen::Vector3d& x) -> Eigen::Vector3d {
        return reeb.e.eval(std::span<const double>(x.data(), 3));
    };
    auto jac_eval = [jac_exprs](const Eigen::Vector3d& x) -> Eigen::Matrix3d {
        Eigen::Matrix3d J;
        std::span<const double> xs(x.data(), 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) J(i, j) = (*jac_exprs)[static_cast<std::size_t>(3 * i + j)].eval(xs);
        return J;
    };
    return transport_along(e_eval, jac_eval, q, t, step, box_halfwidth);
}

}  // namespace srlab
