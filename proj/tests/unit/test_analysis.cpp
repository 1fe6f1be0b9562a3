#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "superrad/analysis.hpp"
#include "superrad/oracle.hpp"
#include "superrad/sweep.hpp"

using namespace superrad;
using namespace superrad::analysis;

namespace {

std::vector<double> grid(double dt, int steps) {
    std::vector<double> t(steps + 1);
    for (int k = 0; k <= steps; ++k) t[k] = k * dt;
    return t;
}

template <class F>
std::vector<double> sample(const std::vector<double>& t, F&& f) {
    std::vector<double> y(t.size());
    std::transform(t.begin(), t.end(), y.begin(), f);
    return y;
}

std::vector<ScalingPoint> power_points(std::vector<int> ns, double prefactor, double zeta) {
    std::vector<ScalingPoint> pts;
    for (int n : ns) pts.push_back({n, prefactor * std::pow(n, zeta)});
    return pts;
}

SystemParams collective_params(double g) {
    SystemParams p;
    p.gamma_col = 1.0;
    p.kappa = 1.0;
    p.g = g;
    return p;
}

}  // namespace

TEST_CASE("moving average") {
    const std::vector<double> y{1, 2, 3, 10, 5};
    CHECK(moving_average(y, 1) == y);
    const auto s = moving_average(y, 3);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == doctest::Approx(2.0));
    CHECK(s[2] == doctest::Approx(5.0));
    CHECK(s[4] == 5.0);
    CHECK_THROWS(moving_average(y, 4));
}

TEST_CASE("derivative is exact on quadratics") {
    const auto t = grid(0.1, 10);
    const auto y = sample(t, [](double x) { return 3 * x * x - x + 2; });
    const auto d = derivative(t, y);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(d[k] == doctest::Approx(6 * t[k] - 1).epsilon(1e-10).scale(1.0));
}

TEST_CASE("linear ramp: unit slope at the first grid point") {
    const auto t = grid(0.01, 100);
    const auto m = emission_strength(t, sample(t, [](double x) { return -x; }));
    CHECK(m.intensity == doctest::Approx(1.0));
    CHECK(m.index == 0);
    CHECK(m.t0 == 0.0);
    CHECK(m.resolved);
    CHECK(m.method == "max-slope");
}

TEST_CASE("independent decay peaks at t = 0 with I = 2 gamma N") {
    const double n = 100, gam = 0.5;
    const auto t = grid(1e-3, 3000);
    const auto m = emission_strength(t, sample(t, [&](double x) { return 0.5 * n * (2 * std::exp(-2 * gam * x) - 1); }));
    CHECK(m.intensity == doctest::Approx(2 * gam * n).epsilon(1e-3));
    CHECK(m.index == 0);
}

TEST_CASE("two-atom cascade from the exact solver") {
    // -dS_z/dt = 4 G e^{-4Gt} (1 + 4Gt), maximized numerically on a fine grid.
    const double gam = 1.0;
    double best = 0.0;
    for (int k = 0; k <= 200000; ++k) {
        const double t = k * 1e-5;
        best = std::max(best, 4 * gam * std::exp(-4 * gam * t) * (1 + 4 * gam * t));
    }
    NumericalParams num;
    num.dt = 1e-3;
    num.t_max = 2.0;
    SystemParams p = collective_params(0.0);
    p.n_atoms = 2;
    const auto series = oracle::simulate(validate_params(p, num));
    const auto m = emission_strength(series);
    CHECK(m.intensity == doctest::Approx(best).epsilon(1e-3));
    CHECK(m.t0 < 0.01);
}

TEST_CASE("interior burst of a hyperbolic-secant pulse") {
    // S_z = -(N/2) tanh(G N (t - td)): -dS_z/dt peaks at td with I = G N^2 / 2.
    const double n = 40, td = 0.1;
    auto curve = [&](double x) { return -0.5 * n * std::tanh(n * (x - td)); };
    const auto coarse = grid(2e-4, 1500);
    const auto fine = grid(1e-4, 3000);
    const auto a = emission_strength(coarse, sample(coarse, curve));
    const auto b = emission_strength(fine, sample(fine, curve));
    CHECK(a.intensity == doctest::Approx(0.5 * n * n).epsilon(0.01));
    CHECK(a.t0 == doctest::Approx(td).epsilon(1e-3));
    CHECK(std::abs(a.intensity - b.intensity) / b.intensity < 0.01);
}

TEST_CASE("a maximum on the last point is unresolved") {
    const auto t = grid(0.01, 50);
    const auto m = emission_strength(t, sample(t, [](double x) { return -x * x; }));
    CHECK_FALSE(m.resolved);
    CHECK(m.index == 50);
}

TEST_CASE("negative slopes clamp to zero intensity") {
    const auto t = grid(0.01, 50);
    CHECK(emission_strength(t, sample(t, [](double x) { return x; })).intensity == 0.0);
}

TEST_CASE("power-law fits") {
    SUBCASE("exact quadratic") {
        const std::vector<ScalingPoint> pts{{10, 100}, {100, 1e4}, {1000, 1e6}};
        const auto f = power_law_fit(pts);
        CHECK(f.zeta == doctest::Approx(2.0));
        CHECK(f.r_squared == doctest::Approx(1.0));
        CHECK(f.zeta_stderr == doctest::Approx(0.0).scale(1.0));
    }
    SUBCASE("exact linear") {
        const auto pts = power_points({50, 100, 200, 400}, 5.0, 1.0);
        const auto f = power_law_fit(pts);
        CHECK(f.zeta == doctest::Approx(1.0));
        CHECK(f.intercept == doctest::Approx(std::log(5.0)));
    }
    SUBCASE("noisy points: OLS by hand") {
        const std::vector<ScalingPoint> pts{{50, 120}, {100, 260}, {200, 800}, {400, 2100}};
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : pts) {
            const double x = std::log(p.n), y = std::log(p.intensity);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
        const auto f = power_law_fit(pts);
        CHECK(f.zeta == doctest::Approx(slope).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx((sy - slope * sx) / 4).epsilon(1e-12));
        CHECK(f.r_squared < 1.0);
        CHECK(f.zeta_stderr > 0.0);
    }
    SUBCASE("rescaling shifts only the intercept") {
        auto pts = power_points({50, 100, 200, 400}, 2.0, 1.7);
        pts[1].intensity *= 1.1;
        const auto a = power_law_fit(pts);
        for (auto& p : pts) p.intensity *= 7.0;
        const auto b = power_law_fit(pts);
        CHECK(b.zeta == doctest::Approx(a.zeta).epsilon(1e-12));
        CHECK(b.intercept == doctest::Approx(a.intercept + std::log(7.0)).epsilon(1e-12));
    }
    SUBCASE("order does not matter") {
        auto pts = power_points({50, 100, 200, 400}, 2.0, 1.7);
        pts[2].intensity *= 0.9;
        const auto a = power_law_fit(pts);
        std::reverse(pts.begin(), pts.end());
        std::swap(pts[0], pts[2]);
        const auto b = power_law_fit(pts);
        CHECK(b.zeta == a.zeta);
        CHECK(b.intercept == a.intercept);
        CHECK(b.r_squared == a.r_squared);
    }
}

TEST_CASE("fit errors") {
    const std::vector<ScalingPoint> bad{{10, 1}, {20, 0}, {40, 3}};
    try {
        power_law_fit(bad);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        CHECK(std::string(e.what()).find("N=20") != std::string::npos);
    }
    const std::vector<ScalingPoint> two{{10, 1}, {20, 2}};
    CHECK_THROWS_AS(power_law_fit(two), AnalysisError);
    const std::vector<ScalingPoint> dup{{10, 1}, {10, 2}, {40, 3}};
    CHECK_THROWS_AS(power_law_fit(dup), AnalysisError);
}

TEST_CASE("convergence verdicts") {
    const auto a = make_report(power_points({50, 100, 200, 400}, 1.0, 1.76), "cfg");
    const auto b = make_report(power_points({50, 100, 200, 400}, 1.3, 1.77), "cfg");
    const auto c = make_report(power_points({50, 100, 200, 400}, 1.0, 1.85), "cfg");
    const auto same = convergence_check(a, a);
    CHECK(same.pass);
    CHECK(same.delta == 0.0);
    CHECK(convergence_check(a, b).pass);
    const auto v = convergence_check(a, c);
    CHECK_FALSE(v.pass);
    CHECK(v.delta == doctest::Approx(0.09));
    const auto other = make_report(power_points({50, 100, 200, 400}, 1.0, 1.76), "different");
    CHECK_THROWS_AS(convergence_check(a, other), AnalysisError);
}

TEST_CASE("mean-field sweep reproduces the logistic peak rate") {
    // Factorized collective decay at g = 0: u = J + S_z obeys du/dt = -2 G u (N + 1 - u),
    // whose steepest descent is at u = (N + 1) / 2 with rate G (N + 1)^2 / 2.
    SweepRequest req;
    req.params = collective_params(0.0);
    req.numerics.dt = 0.0;
    req.numerics.t_max = 0.0;
    req.solver = Solver::meanfield;
    req.n_list = {10, 20, 40, 80};
    req.dt_scale = 0.25;
    const auto res = scaling_sweep(req);
    REQUIRE(res.report.points.size() == 4);
    std::vector<ScalingPoint> expected;
    for (const auto& p : res.report.points) {
        const double i = 0.5 * (p.n + 1.0) * (p.n + 1.0);
        INFO("N=" << p.n);
        CHECK(p.intensity == doctest::Approx(i).epsilon(0.01));
        CHECK(p.t0 == doctest::Approx(std::log(p.n) / (2.0 * (p.n + 1))).epsilon(0.02));
        expected.push_back({p.n, i});
    }
    CHECK(res.report.fit.zeta == doctest::Approx(power_law_fit(expected).zeta).epsilon(0.005));
    CHECK(res.report.fingerprint == sweep_fingerprint(req));
}

TEST_CASE("truncated horizons abort the sweep") {
    SweepRequest req;
    req.params = collective_params(0.0);
    req.numerics.dt = 1e-4;
    req.numerics.t_max = 0.01;
    req.solver = Solver::meanfield;
    req.n_list = {10, 20, 40};
    CHECK_THROWS_AS(scaling_sweep(req), AnalysisError);
}

TEST_CASE("sweep configuration policy") {
    SweepRequest req;
    req.params = collective_params(10.0);
    req.numerics.dt = 0.0;
    req.numerics.t_max = 0.0;
    req.numerics.seed = 3;
    const Config c = sweep_config(req, 100);
    CHECK(c.system().n_atoms == 100);
    CHECK(c.numerics().dt == doctest::Approx(default_time_step(1.0, 100)));
    CHECK(c.numerics().t_max == doctest::Approx(default_horizon(c.system(), 100)));
    CHECK(c.numerics().seed != sweep_config(req, 200).numerics().seed);

    SweepRequest halved = req;
    halved.dt_scale = 0.5;
    halved.numerics.n_traj *= 2;
    CHECK(sweep_config(halved, 100).numerics().dt == doctest::Approx(0.5 * c.numerics().dt));
    CHECK(sweep_fingerprint(halved) == sweep_fingerprint(req));
    SweepRequest moved = req;
    moved.params.g = 5.0;
    CHECK(sweep_fingerprint(moved) != sweep_fingerprint(req));
}

TEST_CASE("solver and scheme must match") {
    CHECK_THROWS_AS(check_solver(Scheme::individual, Solver::twa), ValidationError);
    CHECK_THROWS_AS(check_solver(Scheme::collective, Solver::dtwa), ValidationError);
    CHECK_NOTHROW(check_solver(Scheme::collective, Solver::oracle));
    CHECK(solver_from_string(to_string(Solver::meanfield)) == Solver::meanfield);
}
