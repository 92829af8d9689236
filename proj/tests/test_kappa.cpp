#include <doctest.h>

#include "srlab/catalog.hpp"
#include "srlab/flow.hpp"
#include "srlab/kappa.hpp"

using namespace srlab;

TEST_CASE("flat heisenberg curvature vanishes") {
    auto s = catalog::heisenberg_flat();
    for (double t : {0.0, 0.3, -0.4}) {
        Eigen::Vector3d q(t, -t / 2, t / 3);
        CHECK(std::abs(kappa_estimate(s.frame, s.A, q)) <= 1e-6);
    }
}

TEST_CASE("su2 killing metric has constant curvature 4") {
    // oracle: the quotient surface is the sphere of radius 1/2 (curvature 4)
    auto s = catalog::su2_killing();
    double mn = 1e300, mx = -1e300;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d q(0.07 * i - 0.07, 0.05 * i - 0.05, 0.04 * i - 0.04);
        double k = kappa_estimate(s.frame, s.A, q);
        mn = std::min(mn, k);
        mx = std::max(mx, k);
    }
    CHECK(mx - mn <= 1e-5);
    CHECK(mn == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("kappa is constant along reeb orbits") {
    auto s = catalog::su2_killing();
    Eigen::Vector3d q(0.1, -0.05, 0.08);
    CotangentTransport orbit = reeb_transport(s.frame, s.A, q, 0.5, 1e-2);
    double k0 = kappa_estimate(s.frame, s.A, orbit.points.front());
    double k1 = kappa_estimate(s.frame, s.A, orbit.points.back());
    CHECK(std::abs(k1 - k0) <= 1e-6);
}

TEST_CASE("non reeb invariant metrics are refused") {
    auto s = catalog::heisenberg_unimodular_z(0.3);
    CHECK_THROWS_AS(kappa_estimate(s.frame, s.A, Eigen::Vector3d(0, 0, 0.4)),
                    KappaPreconditionError);
}
