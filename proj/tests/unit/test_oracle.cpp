#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "superrad/oracle.hpp"

using namespace superrad;
using namespace superrad::oracle;

namespace {

SystemParams collective(double g, double gam, double kappa, int n, double wa = 0.0, double wc = 0.0) {
    SystemParams p;
    p.frame = Frame::lab;
    p.omega_a = wa;
    p.omega_c = wc;
    p.g = g;
    p.gamma_col = gam;
    p.kappa = kappa;
    p.n_atoms = n;
    return p;
}

SystemParams individual(double g, double gam, double kappa, int n, double wa = 0.0, double wc = 0.0) {
    SystemParams p = collective(g, 0.0, kappa, n, wa, wc);
    p.gamma_col.reset();
    p.gamma_ind = gam;
    return p;
}

std::vector<double> grid(double dt, int steps) {
    std::vector<double> t(steps + 1);
    for (int k = 0; k <= steps; ++k) t[k] = k * dt;
    return t;
}

Matrix random_hermitian(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> z;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = complex(z(gen), z(gen));
    return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("single atom decays exponentially") {
    for (double kappa : {0.0, 1.0}) {
        const auto l = build_liouvillian_collective(collective(0, 0.8, kappa, 1), 1, 2);
        const auto t = grid(0.1, 30);
        const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t);
        for (std::size_t k = 0; k < t.size(); ++k)
            CHECK(2 * s.sz_mean[k] == doctest::Approx(2 * std::exp(-1.6 * t[k]) - 1).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("two-atom Dicke cascade") {
    const double gam = 0.6;
    const auto l = build_liouvillian_collective(collective(0, gam, 1.0, 2), 2, 3);
    const auto t = grid(0.05, 60);
    const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t, {Method::adaptive});
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = std::exp(-4 * gam * t[k]);
        CHECK(s.sz_mean[k] == doctest::Approx(2 * e + 4 * gam * t[k] * e - 1).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("the Liouvillian annihilates the trace") {
    std::mt19937_64 gen(2024);
    const auto lc = build_liouvillian_collective(collective(2.0, 0.7, 1.3, 3, 0.4, -0.9), 3, 4);
    const auto li = build_liouvillian_individual(individual(1.1, 0.5, 0.8, 2, 1.0, 2.0), 2, 3);
    for (int k = 0; k < 100; ++k) {
        CHECK(std::abs(oracle::apply(lc, random_hermitian(lc.dim(), gen)).trace()) < 1e-10);
        CHECK(std::abs(oracle::apply(li, random_hermitian(li.dim(), gen)).trace()) < 1e-10);
    }
}

TEST_CASE("one atom: both schemes coincide") {
    const auto lc = build_liouvillian_collective(collective(1.5, 0.4, 2.0, 1, 0.3, 0.3), 1, 3);
    const auto li = build_liouvillian_individual(individual(1.5, 0.4, 2.0, 1, 0.3, 0.3), 1, 3);
    CHECK(Matrix(lc.super).isApprox(Matrix(li.super), 1e-14));
    const auto t = grid(0.1, 20);
    const auto a = evolve_density_matrix(lc, excited_vacuum(lc.basis), t);
    const auto b = evolve_density_matrix(li, excited_vacuum(li.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(a.sz_mean[k] == doctest::Approx(b.sz_mean[k]).epsilon(1e-12));
}

TEST_CASE("uncoupled atoms decay independently") {
    const auto l = build_liouvillian_individual(individual(0, 0.5, 1.0, 3), 3, 4);
    const auto t = grid(0.1, 30);
    const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k)
        CHECK(s.sz_mean[k] / 1.5 == doctest::Approx(2 * std::exp(-t[k]) - 1).epsilon(1e-8).scale(1.0));
}

TEST_CASE("zero Liouvillian keeps observables constant") {
    const auto l = build_liouvillian_collective(collective(0, 0, 0, 3), 3, 4);
    CHECK(l.super.nonZeros() == 0);
    const auto t = grid(0.5, 10);
    const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(s.sz_mean[k] == 1.5);
        CHECK(s.photon_mean[k] == 0.0);
    }
}

TEST_CASE("vacuum Rabi oscillation") {
    const double g = 1.7;
    const auto l = build_liouvillian_individual(individual(g, 0, 0, 1, 2.0, 2.0), 1, 2);
    const auto t = grid(0.05, 80);
    for (Method m : {Method::propagator, Method::adaptive}) {
        const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t, {m});
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double p = std::pow(std::sin(g * t[k]), 2);
            CHECK(s.photon_mean[k] == doctest::Approx(p).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("closed dynamics conserve excitations") {
    const auto l = build_liouvillian_collective(collective(3.0, 0, 0, 4, 1.0, 1.5), 4, 5);
    const auto t = grid(0.05, 40);
    const auto s = evolve_density_matrix(l, excited_vacuum(l.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(s.sz_mean[k] + s.photon_mean[k] - 2.0) < 1e-8);
}

TEST_CASE("raising the cutoff does not move the observables") {
    const SystemParams p = collective(10.0, 1.0, 1.0, 4);
    const auto a = build_liouvillian_collective(p, 4, 5);
    const auto b = build_liouvillian_collective(p, 4, 7);
    const auto t = grid(0.02, 50);
    const auto sa = evolve_density_matrix(a, excited_vacuum(a.basis), t);
    const auto sb = evolve_density_matrix(b, excited_vacuum(b.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(sa.sz_mean[k] - sb.sz_mean[k]) < 1e-6);
        CHECK(std::abs(sa.photon_mean[k] - sb.photon_mean[k]) < 1e-6);
    }
}

TEST_CASE("halving the tolerance does not move the collective reference curve") {
    const SystemParams p = collective(10.0, 1.0, 1.0, 4);
    const auto l = build_liouvillian_collective(p, 4, 5);
    const auto t = grid(0.02, 50);
    EvolveOptions loose{Method::adaptive, 2e-8, 2e-10};
    EvolveOptions tight{Method::adaptive, 1e-10, 1e-12};
    const auto a = evolve_density_matrix(l, excited_vacuum(l.basis), t, loose);
    const auto b = evolve_density_matrix(l, excited_vacuum(l.basis), t, tight);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(a.sz_mean[k] - b.sz_mean[k]) < 1e-6);
}

TEST_CASE("two atoms: symmetric sector of the product basis reproduces the Dicke ladder") {
    // Closed dynamics keep |ee, 0> inside the symmetric sector.
    const auto lc = build_liouvillian_collective(collective(1.3, 0, 0, 2, 0.5, 0.8), 2, 3);
    const auto li = build_liouvillian_individual(individual(1.3, 0, 0, 2, 0.5, 0.8), 2, 3);
    const auto t = grid(0.05, 60);
    const auto a = evolve_density_matrix(lc, excited_vacuum(lc.basis), t);
    const auto b = evolve_density_matrix(li, excited_vacuum(li.basis), t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(a.sz_mean[k] == doctest::Approx(b.sz_mean[k]).epsilon(1e-8).scale(1.0));
        CHECK(a.photon_mean[k] == doctest::Approx(b.photon_mean[k]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("two atoms with individual decay: integrators agree") {
    const auto l = build_liouvillian_individual(individual(1.0, 1.0, 20.0, 2), 2, 3);
    const auto t = grid(0.05, 60);
    const auto a = evolve_density_matrix(l, excited_vacuum(l.basis), t, {Method::propagator});
    const auto b = evolve_density_matrix(l, excited_vacuum(l.basis), t, {Method::adaptive});
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(a.sz_mean[k] - b.sz_mean[k]) < 1e-8);
    // Over-damped cavity: the atoms relax fully on the scale 1 / gamma.
    CHECK(a.sz_mean.back() < -0.9);
}

TEST_CASE("states stay Hermitian and positive") {
    const auto l = build_liouvillian_collective(collective(10.0, 1.0, 1.0, 4), 4, 5);
    const auto t = grid(0.05, 20);
    const auto states = evolve_states(l, excited_vacuum(l.basis), t);
    for (const Matrix& rho : states) {
        CHECK((rho - rho.adjoint()).norm() <= 1e-12);
        CHECK(std::abs(rho.trace() - 1.0) <= 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(build_liouvillian_individual(individual(1, 1, 1, 10), 10, 11), OracleError);
    CHECK_THROWS_AS(build_liouvillian_collective(collective(1, 1, 1, 400), 400, 401), OracleError);

    // A truncated cavity fills its top level and must be reported.
    const auto l = build_liouvillian_collective(collective(5.0, 0, 0.01, 4), 4, 2);
    try {
        evolve_density_matrix(l, excited_vacuum(l.basis), grid(0.05, 20));
        FAIL("expected OracleError");
    } catch (const OracleError& e) {
        CHECK(std::string(e.what()).find("cutoff") != std::string::npos);
    }
}

TEST_CASE("simulate follows the configuration grid and default cutoff") {
    NumericalParams n;
    n.dt = 0.1;
    n.t_max = 1.0;
    const Config c = validate_params(collective(0, 1.0, 1.0, 2), n);
    const auto s = simulate(c);
    REQUIRE(s.size() == 11);
    CHECK(s.times[10] == doctest::Approx(1.0));
    CHECK(s.sz_sem[5] == 0.0);
    n.photon_cutoff = 2;
    CHECK_THROWS_AS(simulate(validate_params(collective(0, 1.0, 1.0, 2), n)), ValidationError);
}
