#include "srlab/bvp.hpp"

#include <cmath>

#include "srlab/parallel.hpp"
#include "srlab/rng.hpp"

namespace srlab {

LmResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             Eigen::VectorXd x0, const LmOptions& opts) {
    LmResult res;
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd r = residual(x);
    double cost = r.squaredNorm();
    double mu = opts.initial_damping;
    const Eigen::Index m = x.size();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        Eigen::MatrixXd J(r.size(), m);
        for (Eigen::Index j = 0; j < m; ++j) {
            double h = opts.fd_step * std::max(1.0, std::abs(x(j)));
            Eigen::VectorXd xp = x;
            xp(j) += h;
            J.col(j) = (residual(xp) - r) / h;
        }
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd Areg = JtJ;
            for (Eigen::Index d = 0; d < m; ++d) Areg(d, d) += mu * (JtJ(d, d) + 1e-12);
            Eigen::VectorXd delta = Areg.ldlt().solve(-g);
            Eigen::VectorXd xn = x + delta;
            Eigen::VectorXd rn;
            try {
                rn = residual(xn);
            } catch (const NumericalError&) {
                mu *= 4.0;
                continue;
            }
            double cn = rn.squaredNorm();
            if (cn < cost) {
                x = xn;
                r = rn;
                double gain = cost - cn;
                cost = cn;
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
                if (gain < opts.residual_tolerance * (1.0 + cost)) iter = opts.max_iterations;
                break;
            }
            mu *= 4.0;
        }
        res.iterations = iter + 1;
        if (!stepped) break;
    }
    res.x = x;
    res.residual_norm = std::sqrt(cost);
    res.converged = true;
    return res;
}

namespace {

struct ShootContext {
    HamiltonianFlow flow;
    Eigen::Vector3d q0;
    Eigen::Matrix<double, 2, 3> F;       // frame rows at q0
    Eigen::Matrix<double, 3, 2> pinv;    // Fᵀ(FFᵀ)⁻¹
    Eigen::Matrix2d A0;                  // dual coefficients at q0
    Eigen::Vector3d transversal;         // unit annihilator of Δ(q0)
    double step;
    double max_duration;
    double lambda_scale;

    Eigen::Vector3d covector(double theta, double psi) const {
        Eigen::Vector2d u(std::cos(theta), std::sin(theta));
        Eigen::Vector2d w = u / std::sqrt(u.dot(A0 * u));
        double lambda = lambda_scale * std::tan(psi);
        return pinv * w + lambda * transversal;
    }

    Eigen::Vector3d endpoint(double theta, double psi, double T) const {
        Eigen::VectorXd xi(6);
        xi.head(3) = q0;
        xi.tail(3) = covector(theta, psi);
        Trajectory traj = flow.integrate(xi, T, step, 0);
        return traj.states.back().head(3);
    }
};

}  // namespace

BvpReport solve_geodesic_bvp(const Frame2& frame, const MetricCoeffs& A, const Eigen::Vector3d& q0,
                             const Eigen::Vector3d& q1, const BvpOptions& opts) {
    BvpReport report;
    if ((q1 - q0).norm() < 1e-12) {
        BvpSolution trivial;
        trivial.p0.setZero();
        trivial.converged = true;
        report.solutions.push_back(trivial);
        report.distance = 0.0;
        report.multiplicity = 1;
        report.converged_restarts = opts.restarts;
        return report;
    }

    std::span<const double> q0s(q0.data(), 3);
    Eigen::Matrix<double, 2, 3> F;
    F.row(0) = frame.f1.eval(q0s).transpose();
    F.row(1) = frame.f2.eval(q0s).transpose();
    Eigen::Vector3d omega0 = F.row(0).transpose().cross(F.row(1).transpose());
    ShootContext ctx{HamiltonianFlow(geodesic_hamiltonian(frame, A)),
                     q0,
                     F,
                     F.transpose() * (F * F.transpose()).inverse(),
                     A.eval(q0s),
                     omega0.normalized(),
                     opts.step,
                     opts.max_duration,
                     opts.lambda_scale};

    const double t_guess = std::max(1.5 * (q1 - q0).norm(), 0.05);
    const int n = opts.restarts;
    std::vector<BvpSolution> all(static_cast<std::size_t>(n));

    const int npairs = std::max(1, n / 2);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        // Mirrored (antithetic) pairs: odd indices reflect the fiber angle.
        // Theta is stratified over the pairs so coverage does not depend
        // on drawing luck.
        std::size_t pair = i / 2;
        Rng rng = Rng::stream(opts.seed, pair);
        double theta = 6.283185307179586477 * (static_cast<double>(pair) + rng.uniform()) /
                       static_cast<double>(npairs);
        double psi = rng.uniform(-1.45, 1.45);
        if (i % 2 == 1) theta = 3.14159265358979323846 - theta;

        // Initialize the duration by scanning one trajectory for its
        // closest approach to the target.
        double t0 = t_guess;
        {
            Eigen::VectorXd xi(6);
            xi.head(3) = ctx.q0;
            xi.tail(3) = ctx.covector(theta, psi);
            Trajectory scan = ctx.flow.integrate(xi, ctx.max_duration, ctx.step, 4);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < scan.states.size(); ++k) {
                double d = (scan.states[k].head(3) - q1).norm();
                if (d < best) {
                    best = d;
                    t0 = scan.times[k];
                }
            }
            t0 = std::max(t0, 1e-2);
        }

        auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            double T = std::clamp(x(2), 1e-4, ctx.max_duration);
            double ps = std::clamp(x(1), -1.55, 1.55);
            return ctx.endpoint(x(0), ps, T) - q1;
        };
        Eigen::VectorXd x0(3);
        x0 << theta, psi, t0;
        LmOptions lmo;
        lmo.max_iterations = 120;
        LmResult lm = levenberg_marquardt(residual, x0, lmo);

        BvpSolution sol;
        sol.restart_index = static_cast<int>(i);
        double T = std::clamp(lm.x(2), 1e-4, ctx.max_duration);
        double ps = std::clamp(lm.x(1), -1.55, 1.55);
        sol.p0 = ctx.covector(lm.x(0), ps);
        sol.duration = T;
        sol.length = T;
        sol.terminal_error = lm.residual_norm;
        sol.converged = lm.residual_norm < opts.terminal_tolerance;
        all[i] = sol;
    }, opts.threads);

    // Deterministic reduction in restart order; dedup in (p0, T).
    for (const auto& sol : all) {
        if (!sol.converged) continue;
        ++report.converged_restarts;
        bool duplicate = false;
        for (const auto& kept : report.solutions) {
            // Relative in p0: the transversal component can be large.
            double scale = 1.0 + std::max(kept.p0.norm(), sol.p0.norm());
            double d = (kept.p0 - sol.p0).norm() / scale + std::abs(kept.duration - sol.duration);
            if (d < opts.dedup_radius) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) report.solutions.push_back(sol);
    }
    for (const auto& sol : report.solutions) report.distance = std::min(report.distance, sol.length);
    for (const auto& sol : report.solutions)
        if (sol.length <= report.distance + 1e-5) ++report.multiplicity;
    return report;
}

}  // namespace srlab
