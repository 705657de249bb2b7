/// @file test_ode_oracle.cpp
/// @brief Integrator, limit classification, edge verification, manifold
///        dimensions, energy diagnostics, and dissipativity bounds.

#include <algorithm>
#include <cmath>
#include <string>

#include "catch_amalgamated.hpp"
#include "lvig/attractor_graphs.hpp"
#include "lvig/ode_oracle.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::ContainsSubstring;
using lvig::Community;
using lvig::Matrix;
using lvig::Vector;

namespace {

Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("integrate rejects invalid inputs") {
    const lvig::LVSystem sys = oracle::flagship();

    Vector neg = vec3(0.1, -0.1, 0.1);
    CHECK_THROWS_AS(lvig::integrate(sys, neg, 1.0), lvig::PreconditionFailed);
    CHECK_THROWS_AS(lvig::integrate(sys, Vector::Ones(2), 1.0),
                    lvig::PreconditionFailed);
    CHECK_THROWS_AS(lvig::integrate(sys, Vector::Ones(3), 0.0),
                    lvig::PreconditionFailed);
    CHECK_THROWS_AS(lvig::integrate(sys, Vector::Ones(3), -1.0),
                    lvig::PreconditionFailed);

    lvig::IntegratorOptions bad;
    bad.rtol = 0.0;
    CHECK_THROWS_AS(lvig::integrate(sys, Vector::Ones(3), 1.0, bad),
                    lvig::PreconditionFailed);

    lvig::IntegratorOptions tiny;
    tiny.max_steps = 5;
    CHECK_THROWS_AS(lvig::integrate(sys, Vector::Ones(3), 1e4, tiny),
                    lvig::StiffnessError);
}

TEST_CASE("coordinates starting at zero stay exactly zero") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::Trajectory traj = lvig::integrate(sys, vec3(0.1, 0.0, 0.1), 50.0);

    REQUIRE_FALSE(traj.states.empty());
    for (const Vector& u : traj.states) CHECK(u[1] == 0.0);

    // Within that face the orbit heads for the face attractor.
    const Vector target = oracle::flagship_u(Community::of({0, 2}));
    CHECK((traj.final_state() - target).norm() < 1e-4);
}

TEST_CASE("an orbit started at the attractor stalls") {
    const lvig::LVSystem sys = oracle::flagship();
    const Vector u_star = oracle::flagship_u(Community::full(3));

    // The stall detector fires when |u'| stays below 10*atol for a full
    // window of accepted steps.  The orbit hovers within the rtol noise
    // ball of the attractor, so atol must sit above rtol*|u| for the
    // criterion to have margin.
    lvig::IntegratorOptions options;
    options.atol = 1e-8;
    const lvig::Trajectory traj = lvig::integrate(sys, u_star, 1e4, options);

    CHECK(traj.stalled);
    CHECK(traj.final_time() < 1e4);
    CHECK((traj.final_state() - u_star).norm() < 1e-6);
}

TEST_CASE("interior orbits converge to the globally stable community") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Trajectory traj = lvig::integrate(sys, vec3(0.1, 0.1, 0.1), 1e4);

    const lvig::Classification cls = lvig::classify_limit(traj, catalog, 1e-4);
    REQUIRE(cls.kind == lvig::LimitKind::ConvergedTo);
    REQUIRE(cls.equilibrium.has_value());
    CHECK(cls.equilibrium->community == Community::full(3));
    CHECK((traj.final_state() - oracle::flagship_u(Community::full(3))).norm() <
          1e-4);
}

TEST_CASE("face orbits converge to the face attractor") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Trajectory traj = lvig::integrate(sys, vec3(0.0, 0.0, 1.0), 1e4);

    const lvig::Classification cls = lvig::classify_limit(traj, catalog, 1e-4);
    REQUIRE(cls.kind == lvig::LimitKind::ConvergedTo);
    CHECK(cls.equilibrium->community == Community::of({2}));
}

TEST_CASE("unbounded growth is reported as divergence") {
    Matrix A(1, 1);
    A << 0.0;
    Vector b(1);
    b << 1.0;
    const lvig::LVSystem sys = lvig::make_system_asserted(A, b);
    const lvig::Trajectory traj = lvig::integrate(sys, Vector::Ones(1), 100.0);

    CHECK(traj.terminal.kind == lvig::LimitKind::Diverged);

    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Classification cls = lvig::classify_limit(traj, catalog, 1e-4);
    CHECK(cls.kind == lvig::LimitKind::Diverged);
    CHECK_FALSE(cls.equilibrium.has_value());
}

TEST_CASE("short horizons leave the endpoint undecided") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Trajectory traj = lvig::integrate(sys, vec3(0.1, 0.1, 0.1), 0.1);

    CHECK_FALSE(traj.stalled);
    const lvig::Classification cls = lvig::classify_limit(traj, catalog, 1e-4);
    CHECK(cls.kind == lvig::LimitKind::Undecided);
}

TEST_CASE("classification requires a separated catalog") {
    Matrix A = -Matrix::Identity(2, 2);
    Vector b(2);
    b << 1e-5, 1.0;
    const lvig::LVSystem sys = lvig::make_system(A, b);
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    REQUIRE(catalog.equilibria.size() == 4);

    const lvig::Trajectory traj = lvig::integrate(sys, Vector::Ones(2) * 0.5, 1.0);
    CHECK_THROWS_WITH(lvig::classify_limit(traj, catalog, 1e-4),
                      ContainsSubstring("closer than"));
    CHECK_THROWS_AS(lvig::classify_limit(traj, catalog, 1e-4),
                    lvig::AmbiguousCatalog);
    CHECK_THROWS_AS(lvig::classify_limit(traj, catalog, 0.0),
                    lvig::PreconditionFailed);
}

TEST_CASE("unstable seed follows the invading eigenvector") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Equilibrium& eq3 = catalog.at(Community::of({2}));

    const double eps = 1e-3;
    bool clamped = true;
    const Vector seed =
        lvig::unstable_seed(sys, eq3, Community::of({0, 2}), eps, &clamped);

    CHECK_FALSE(clamped);
    CHECK(seed[0] == Catch::Approx(eps).margin(1e-15));
    CHECK(seed[1] == 0.0);
    CHECK(seed[2] ==
          Catch::Approx(0.28 + eps * oracle::kSeedCoefficient).margin(1e-12));

    // Species 2 cannot invade community {3}: its rate is negative.
    CHECK_THROWS_AS(
        lvig::unstable_seed(sys, eq3, Community::of({1, 2}), eps),
        lvig::NotAnUnstableDirection);
    // A target inside the community adds no invader.
    CHECK_THROWS_AS(lvig::unstable_seed(sys, eq3, Community::of({2}), eps),
                    lvig::NotAnUnstableDirection);
    CHECK_THROWS_AS(
        lvig::unstable_seed(sys, eq3, Community::of({0, 2}), 0.0),
        lvig::PreconditionFailed);
}

TEST_CASE("unstable seed clamps coordinates pushed below zero") {
    const lvig::LVSystem sys = oracle::multiplicity_fixture();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::Equilibrium& eq2 = catalog.at(Community::of({1}));

    // The resolvent pulls the resident below zero at this exaggerated
    // magnitude: u2 + eps * (-2 / 1.9) < 0 for eps = 1.
    bool clamped = false;
    const Vector seed =
        lvig::unstable_seed(sys, eq2, Community::of({2}), 1.0, &clamped);

    CHECK(clamped);
    CHECK(seed[0] == 0.0);
    CHECK(seed[1] == 0.0);
    CHECK(seed[2] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("edge verification confirms invasion-graph connections") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);

    CHECK(lvig::verify_edge(sys, catalog, Community::empty(),
                            Community::of({0})));
    CHECK(lvig::verify_edge(sys, catalog, Community::of({2}),
                            Community::of({0, 2})));
    CHECK(lvig::verify_edge(sys, catalog, Community::of({0, 2}),
                            Community::full(3)));

    // Species 3 invades {1,2}, but the interior orbit runs to the full
    // community, not to {1,3}: the claimed connection is refuted.
    CHECK_FALSE(lvig::verify_edge(sys, catalog, Community::of({0, 1}),
                                  Community::of({0, 2})));

    // A horizon too short to settle anything exhausts every retry.
    CHECK_THROWS_AS(
        lvig::verify_edge(sys, catalog, Community::empty(),
                          Community::of({0}), 1e-4, 1e-6),
        lvig::VerificationInconclusive);
}

TEST_CASE("edge verification crosses between non-nested communities") {
    const lvig::LVSystem sys = oracle::multiplicity_fixture();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);

    // Equilibria here have unit-sized coordinates, so the stall detector
    // needs atol above the rtol noise floor to ever report convergence.
    lvig::IntegratorOptions options;
    options.atol = 1e-8;
    options.record_states = false;

    // Species 3 invades {2} and displaces it entirely.
    CHECK(lvig::verify_edge(sys, catalog, Community::of({1}),
                            Community::of({2}), 1e-4, 1e4, 1e-4, options));

    // Species 1 invades {2} but the orbit reaches {1,2}, not {1}.
    CHECK_FALSE(lvig::verify_edge(sys, catalog, Community::of({1}),
                                  Community::of({0}), 1e-4, 1e4, 1e-4,
                                  options));

    // Species 2 cannot invade {3}.
    CHECK_THROWS_AS(lvig::verify_edge(sys, catalog, Community::of({2}),
                                      Community::of({1})),
                    lvig::NotAnUnstableDirection);
}

TEST_CASE("manifold dimensions follow the linearization spectrum") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);

    const auto dims = [&](std::initializer_list<int> members) {
        return lvig::manifold_dimensions(
            sys, catalog.at(Community::of(members)));
    };

    const lvig::ManifoldDimensions d_empty = dims({});
    CHECK(d_empty.unstable == 2);
    CHECK(d_empty.stable == 1);
    CHECK(d_empty.center == 0);

    const lvig::ManifoldDimensions d3 = dims({2});
    CHECK(d3.unstable == 1);
    CHECK(d3.stable == 2);
    CHECK(d3.center == 0);

    const lvig::ManifoldDimensions d13 = dims({0, 2});
    CHECK(d13.unstable == 1);
    CHECK(d13.stable == 2);
    CHECK(d13.center == 0);

    const lvig::ManifoldDimensions d_full = dims({0, 1, 2});
    CHECK(d_full.unstable == 0);
    CHECK(d_full.stable == 3);
    CHECK(d_full.center == 0);
}

TEST_CASE("transversality obstruction flags impossible transversal connections") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);

    // dim W^u({3}) + dim W^s({1,3}) = 1 + 2 < 4: no transversal connection.
    CHECK(lvig::transversality_obstruction(sys, catalog,
                                           Community::of({2}),
                                           Community::of({0, 2})));
    // 2 + 3 >= 4: the interior connection is unobstructed.
    CHECK_FALSE(lvig::transversality_obstruction(
        sys, catalog, Community::empty(), Community::full(3)));

    // The same pair inside the two-species restriction clears the bound:
    // 1 + 2 = 3 = n + 1.
    const lvig::LVSystem restricted = oracle::restricted_fixture();
    const lvig::EquilibriumCatalog rcat = lvig::enumerate_admissible(restricted);
    CHECK_FALSE(lvig::transversality_obstruction(restricted, rcat,
                                                 Community::of({1}),
                                                 Community::of({0, 1})));

    // A center direction renders the test meaningless.
    const lvig::LVSystem nh = oracle::nonhyperbolic_fixture();
    const lvig::EquilibriumCatalog nhcat = lvig::enumerate_admissible(nh);
    CHECK_THROWS_AS(
        lvig::transversality_obstruction(nh, nhcat, Community::of({1}),
                                         Community::empty()),
        lvig::PreconditionFailed);
}

TEST_CASE("energy function requires symmetry") {
    const lvig::LVSystem sys = oracle::flagship();
    CHECK_THROWS_AS(lvig::macarthur_V(sys, Vector::Ones(3)), lvig::NotSymmetric);
    CHECK_THROWS_WITH(lvig::macarthur_V(sys, Vector::Ones(3)),
                      ContainsSubstring("(1,2)"));
    CHECK_THROWS_AS(lvig::macarthur_dissipation(sys, Vector::Ones(3)),
                    lvig::NotSymmetric);
}

TEST_CASE("energy values for a symmetric system") {
    const lvig::LVSystem sys = oracle::symmetric_fixture();
    const lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);

    CHECK(lvig::macarthur_V(sys, Vector::Zero(2)) == 0.0);

    Vector u1(2), u2(2);
    u1 << 1.0, 0.0;
    u2 << 0.0, 1.0;
    CHECK(lvig::macarthur_V(sys, u1) == Catch::Approx(-0.5).margin(1e-14));
    CHECK(lvig::macarthur_V(sys, u2) == Catch::Approx(-0.5).margin(1e-14));

    const Vector u12 = catalog.at(Community::full(2)).u_star;
    CHECK(lvig::macarthur_V(sys, u12) ==
          Catch::Approx(-10.0 / 9.0).margin(1e-13));

    // At every equilibrium V(u*) = -u*.b / 2.
    for (const lvig::Equilibrium& eq : catalog.equilibria)
        CHECK(lvig::macarthur_V(sys, eq.u_star) ==
              Catch::Approx(-0.5 * eq.u_star.dot(sys.b)).margin(1e-13));
}

TEST_CASE("dissipation matches the closed form and the flow") {
    const lvig::LVSystem sys = oracle::symmetric_fixture();

    Vector u(2);
    u << 0.5, 0.25;
    const Vector r = sys.b + sys.A * u;
    const double expected = -(r[0] * r[0] * u[0] + r[1] * r[1] * u[1]);
    CHECK(lvig::macarthur_dissipation(sys, u) ==
          Catch::Approx(expected).margin(1e-14));

    // Finite-difference check of dV/dt along the flow.
    const Vector udot = u.cwiseProduct(r);
    const double h = 1e-7;
    const double fd =
        (lvig::macarthur_V(sys, Vector(u + h * udot)) - lvig::macarthur_V(sys, u)) /
        h;
    CHECK(lvig::macarthur_dissipation(sys, u) == Catch::Approx(fd).margin(1e-6));

    // The energy never increases along an orbit.
    Vector u0(2);
    u0 << 0.2, 1.5;
    const lvig::Trajectory traj = lvig::integrate(sys, u0, 50.0);
    for (std::size_t k = 1; k < traj.states.size(); ++k)
        CHECK(lvig::macarthur_V(sys, traj.states[k]) <=
              lvig::macarthur_V(sys, traj.states[k - 1]) + 1e-12);
}

TEST_CASE("edge energies decrease along a symmetric system's graph") {
    const lvig::LVSystem sys = oracle::symmetric_fixture();
    lvig::EquilibriumCatalog catalog = lvig::enumerate_admissible(sys);
    const lvig::InvasionScheme scheme = lvig::invasion_scheme(sys, catalog);
    const lvig::AttractorGraph ig = lvig::build_ig(scheme);

    CHECK(lvig::symmetric_edge_monotonicity(sys, ig));
    CHECK_THROWS_AS(
        lvig::symmetric_edge_monotonicity(oracle::flagship(), ig),
        lvig::NotSymmetric);
}

TEST_CASE("dissipativity bound from certificate weights") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::DissipativityBound bound = lvig::dissipativity_bound(sys);

    const Vector pi = oracle::flagship_pi();
    REQUIRE(bound.h.size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK(bound.h[i] == Catch::Approx(pi[i]).margin(1e-12));
    CHECK(bound.c == Catch::Approx(oracle::kDissipC).margin(1e-15));
    CHECK(bound.d == Catch::Approx(oracle::kDissipD).epsilon(1e-12));
    CHECK(bound.threshold ==
          Catch::Approx(oracle::kDissipThreshold).epsilon(1e-12));

    // A system carrying no weight vector cannot produce a bound.
    CHECK_THROWS_AS(lvig::dissipativity_bound(oracle::multiplicity_fixture()),
                    lvig::PreconditionFailed);
}

TEST_CASE("the weighted total population is absorbed below the threshold") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::DissipativityBound bound = lvig::dissipativity_bound(sys);

    const lvig::Trajectory traj =
        lvig::integrate(sys, Vector::Ones(3) * 20.0, 200.0);
    REQUIRE(bound.h.dot(traj.states.front()) > bound.threshold);

    bool absorbed = false;
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const double w_now = bound.h.dot(traj.states[k]);
        const double w_next = bound.h.dot(traj.states[k + 1]);
        if (w_now > bound.threshold) {
            CHECK(w_next < w_now);
        } else {
            absorbed = true;
        }
        if (absorbed) CHECK(w_next <= bound.threshold + 1e-9);
    }
    CHECK(absorbed);
    CHECK(bound.h.dot(traj.final_state()) <= bound.threshold);
}

TEST_CASE("trajectory CSV dump") {
    const lvig::LVSystem sys = oracle::flagship();
    const lvig::Trajectory traj = lvig::integrate(sys, vec3(0.1, 0.1, 0.1), 1.0);
    const std::string csv = lvig::trajectory_to_csv(traj);

    CHECK(csv.rfind("t,u_1,u_2,u_3\n", 0) == 0);
    CHECK_THAT(csv, ContainsSubstring("\n0,0.1,0.1,0.1\n"));

    const auto newlines =
        static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(newlines == traj.times.size() + 1);
}
