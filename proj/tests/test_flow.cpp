#include <doctest.h>

#include "srlab/bvp.hpp"
#include "srlab/catalog.hpp"

using namespace srlab;

namespace {

// closed-form flat Heisenberg geodesic from the origin with p3 = 0:
// straight line in the (x1,x2) plane
Eigen::VectorXd flat_state(double px, double py) {
    Eigen::VectorXd xi(6);
    xi << 0, 0, 0, px, py, 0;
    return xi;
}

}  // namespace

TEST_CASE("straight geodesic and energy drift") {
    auto s = catalog::heisenberg_flat();
    SymbolicHamiltonian h = geodesic_hamiltonian(s.frame, s.A);
    Trajectory tr = integrate_hamiltonian(h, flat_state(1.0, 0.0), 1.0, 1e-3, 0);
    Eigen::VectorXd q = tr.position(tr.states.size() - 1);
    CHECK((q - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-10);
    CHECK(tr.energy_drift <= 1e-10);
    SUBCASE("T = 0 returns the initial state") {
        Trajectory none = integrate_hamiltonian(h, flat_state(0.3, 0.4), 0.0, 1e-3);
        CHECK(none.states.size() == 1);
        CHECK((none.states.front() - flat_state(0.3, 0.4)).norm() == 0.0);
    }
}

TEST_CASE("degree-1 hamiltonian generates the reeb flow") {
    auto s = catalog::heisenberg_flat();
    ReebField reeb = reeb_field(s.frame, s.A);
    Eigen::VectorXd xi(6);
    xi << 0.2, -0.1, 0.4, 0.5, 0.5, 0.5;
    Trajectory tr = integrate_hamiltonian(reeb.u_h, xi, 0.7, 1e-3, 0);
    Eigen::VectorXd q = tr.position(tr.states.size() - 1);
    CHECK((q - Eigen::Vector3d(0.2, -0.1, 0.4 - 0.7)).norm() <= 1e-10);
}

TEST_CASE("rk4 order on a curved geodesic") {
    auto s = catalog::heisenberg_flat();
    SymbolicHamiltonian h = metric_hamiltonian(s.frame, s.A);
    Eigen::VectorXd xi(6);
    xi << 0, 0, 0, 0.8, 0.0, 1.3;  // nonzero p3 bends the geodesic
    auto endpoint = [&](double step) {
        Trajectory tr = integrate_hamiltonian(h, xi, 1.0, step, 0);
        return tr.states.back();
    };
    Eigen::VectorXd ref = endpoint(1.0 / 4096);
    double e1 = (endpoint(1.0 / 64) - ref).norm();
    double e2 = (endpoint(1.0 / 128) - ref).norm();
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("reeb cotangent transport") {
    auto flat = catalog::heisenberg_flat();
    CotangentTransport tr = reeb_transport(flat.frame, flat.A, {0.1, 0.2, 0.3}, 0.5, 1e-2);
    CHECK((tr.maps.front() - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
    // flat Heisenberg: [∂x3, f_i] = 0, so the transport is the identity
    CHECK((tr.maps.back() - Eigen::Matrix3d::Identity()).norm() <= 1e-10);

    // composition property on a z-dependent catalog metric
    auto s = catalog::heisenberg_unimodular_z(0.3);
    Eigen::Vector3d q(0.0, 0.0, 0.4);
    CotangentTransport ab = reeb_transport(s.frame, s.A, q, 0.35, 1e-3);
    CotangentTransport a = reeb_transport(s.frame, s.A, q, 0.15, 1e-3);
    Eigen::Vector3d mid = a.points.back();
    CotangentTransport b = reeb_transport(s.frame, s.A, mid, 0.2, 1e-3);
    CHECK((b.maps.back() * a.maps.back() - ab.maps.back()).norm() <= 1e-8);
}

TEST_CASE("heisenberg bvp oracle") {
    auto s = catalog::heisenberg_flat();
    BvpOptions opts;
    opts.seed = 11;
    opts.restarts = 16;
    BvpReport rep = solve_geodesic_bvp(s.frame, s.A, {0, 0, 0}, {1, 0, 0}, opts);
    REQUIRE(rep.multiplicity >= 1);
    CHECK(rep.distance == doctest::Approx(1.0).epsilon(1e-6));

    SUBCASE("coincident endpoints") {
        BvpReport trivial = solve_geodesic_bvp(s.frame, s.A, {0.2, 0.1, 0}, {0.2, 0.1, 0}, opts);
        CHECK(trivial.distance <= 1e-6);
    }
}

TEST_CASE("bvp determinism") {
    auto s = catalog::heisenberg_flat();
    BvpOptions opts;
    opts.seed = 4;
    opts.restarts = 8;
    BvpReport a = solve_geodesic_bvp(s.frame, s.A, {0, 0, 0}, {0.3, 0.2, 0.05}, opts);
    BvpReport b = solve_geodesic_bvp(s.frame, s.A, {0, 0, 0}, {0.3, 0.2, 0.05}, opts);
    REQUIRE(a.solutions.size() == b.solutions.size());
    CHECK(a.distance == b.distance);
    for (std::size_t i = 0; i < a.solutions.size(); ++i)
        CHECK((a.solutions[i].p0 - b.solutions[i].p0).norm() == 0.0);
}
