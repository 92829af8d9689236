#pragma once

#include <functional>

#include "srlab/catalog.hpp"
#include "srlab/hamiltonian.hpp"

namespace srlab {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainExitError : NumericalError {
    using NumericalError::NumericalError;
};

/// Sampled cotangent-bundle path (q, p) with integrator metadata.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;  // size 2n: q then p
    double step = 0.0;
    std::string method = "rk4";
    double energy_drift = 0.0;  // max |H(t) − H(0)|

    int dimension() const { return states.empty() ? 0 : static_cast<int>(states.front().size()) / 2; }
    Eigen::VectorXd position(std::size_t i) const {
        return states[i].head(states[i].size() / 2);
    }
    Eigen::VectorXd momentum(std::size_t i) const {
        return states[i].tail(states[i].size() / 2);
    }
};

/// Compiled Hamiltonian vector field q̇ = ∂H/∂p, ṗ = −∂H/∂x with exact
/// symbolic partials, integrated by the classical fixed-step RK4 scheme.
class HamiltonianFlow {
public:
    explicit HamiltonianFlow(const SymbolicHamiltonian& H);

    int dimension() const { return dim_; }
    double energy(const Eigen::VectorXd& state) const;
    Eigen::VectorXd rhs(const Eigen::VectorXd& state) const;
    Eigen::VectorXd rk4_step(const Eigen::VectorXd& state, double dt) const;

    /// Integrate over duration T (possibly negative) with |dt| = step.
    /// record_every = 0 keeps only the endpoints.
    Trajectory integrate(const Eigen::VectorXd& xi0, double T, double step,
                         std::size_t record_every = 1) const;

private:
    int dim_;
    SymbolicHamiltonian H_;
    std::vector<SymbolicHamiltonian> dHdp_, dHdx_;
};

Trajectory integrate_hamiltonian(const SymbolicHamiltonian& H, const Eigen::VectorXd& xi0, double T,
                                 double step, std::size_t record_every = 1);

/// Base path of a flow together with the induced linear transport of
/// covector fibers (the lift of the flow to T*M restricted to fibers).
struct CotangentTransport {
    std::vector<double> times;             // from 0 to t
    std::vector<Eigen::Vector3d> points;   // base orbit
    std::vector<Eigen::Matrix3d> maps;     // M(t): p(0) ↦ p(t), M(0) = I
};

/// Transport along a generator given numerically: e(q) and its Jacobian.
/// Solves q̇ = e(q), Ṁ = −J(q)ᵀ M by RK4. An optional box ±box_halfwidth
/// around the start point bounds the orbit; leaving it raises
/// DomainExitError.
CotangentTransport transport_along(
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& e,
    const std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>& jac, const Eigen::Vector3d& q,
    double t, double step, double box_halfwidth = 0.0);

/// Transport along the Reeb field of (frame, A).
CotangentTransport reeb_transport(const Frame2& frame, const MetricCoeffs& A,
                                  const Eigen::Vector3d& q, double t, double step,
                                  double box_halfwidth = 0.0);

}  // namespace srlab
