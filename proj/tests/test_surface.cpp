#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cwave/surface.hpp"

using namespace cwave;

namespace {

PhysicalOptions small_box(double dx = 1.0 / 64, double X = 4.0, double t_end = 2.0, double R = 1.0) {
    PhysicalOptions o;
    o.dx = dx;
    o.half_width = X;
    o.t_end = t_end;
    o.track_radius = R;
    return o;
}

PhysicalState homogeneous(const PhysicalOptions& o, double T) {
    const double a = 2.0 / (o.p - 1.0);
    const double k0 = std::pow(2.0 * (o.p + 1.0) / ((o.p - 1.0) * (o.p - 1.0)), 1.0 / (o.p - 1.0));
    return physical_state(
        o, [&](double) { return cplx(k0 * std::pow(T, -a)); },
        [&](double) { return cplx(a * k0 * std::pow(T, -a - 1.0)); });
}

}  // namespace

TEST_CASE("zero data stays zero") {
    const PhysicalOptions o = small_box(1.0 / 32, 2.0, 1.0);
    const PhysicalRun r = evolve_physical(physical_state(o, [](double) { return cplx(0); }, [](double) { return cplx(0); }), o);
    for (const cplx& u : r.state.u) CHECK(u == cplx(0.0));
    CHECK(r.frozen == 0);
    CHECK(r.state.t == doctest::Approx(1.0));
}

TEST_CASE("homogeneous data follows the ODE blow-up law") {
    for (double p : {3.0, 5.0}) {
        PhysicalOptions o = small_box();
        o.p = p;
        const double T = 0.8;
        const double a = 2.0 / (p - 1.0);
        const double k0 = std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
        const PhysicalRun r = evolve_physical(homogeneous(o, T), o);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.hist_t.size(); ++i) {
            const double exact = k0 * std::pow(T - r.hist_t[i], -a);
            if (exact <= o.ceiling) worst = std::max(worst, std::fabs(r.hist_max[i] / exact - 1.0));
        }
        // at p = 5 the band below the ceiling sits at T - t ~ 1e-6, where 1%
        // would need T to 5e-9; the tracking check is the p = 3 statement
        if (p == 3.0) CHECK(worst <= 0.01);
        CHECK(r.frozen == (int)r.state.n());
        for (const NodeFit& f : r.fit) {
            REQUIRE(std::isfinite(f.T));
            CHECK(std::fabs(f.T / T - 1.0) <= 0.01);
            CHECK(std::fabs(f.T - T) <= 1e-5);
        }
    }
}

TEST_CASE("phase rotation commutes with the flow") {
    PhysicalOptions o = small_box(1.0 / 256, 2.0, 0.5, 0.5);
    const PhysicalRun a = evolve_physical(odd_state(OddProfile{2.0, 0.5, 0.0}, o), o);
    const PhysicalRun b = evolve_physical(odd_state(OddProfile{2.0, 0.5, 0.8}, o), o);
    const cplx e = std::polar(1.0, 0.8);
    REQUIRE(a.steps == b.steps);
    double err = 0.0;
    for (std::size_t i = 0; i < a.state.n(); ++i) err = std::max(err, std::abs(b.state.u[i] - e * a.state.u[i]));
    CHECK(err <= 1e-12);
}

TEST_CASE("serial and OpenMP paths agree bit for bit") {
    PhysicalOptions o = small_box(1.0 / 512, 2.0, 0.3, 0.5);
    o.exec = Exec::serial;
    const PhysicalRun a = evolve_physical(odd_state(OddProfile{}, o), o);
    o.exec = Exec::parallel;
    const PhysicalRun b = evolve_physical(odd_state(OddProfile{}, o), o);
    REQUIRE(a.steps == b.steps);
    bool same = true;
    for (std::size_t i = 0; i < a.state.n(); ++i) same = same && a.state.u[i] == b.state.u[i];
    CHECK(same);
}

TEST_CASE("cone deadlines match the brute-force minimum") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> f(300, inf), d;
    for (int k = 0; k < 12; ++k) f[rng() % f.size()] = U(rng);
    cone_deadlines(f, 0.01, d);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double m = inf;
        for (std::size_t j = 0; j < f.size(); ++j) m = std::min(m, f[j] + 0.01 * std::fabs((double)i - (double)j));
        CHECK(d[i] == doctest::Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("data outside the backward cone does not reach the tracked region") {
    const PhysicalOptions o = small_box(1.0 / 128, 3.0, 1.0, 0.5);
    auto base = [](double x) { return cplx(0.3 * std::exp(-x * x), 0.1 * x * std::exp(-x * x)); };
    const PhysicalRun a = evolve_physical(physical_state(o, base, [](double) { return cplx(0); }), o);
    auto moved = [&](double x) { return std::fabs(x) > 2.5 ? base(x) + cplx(0.2, 0.0) : base(x); };
    const PhysicalRun b = evolve_physical(physical_state(o, moved, [](double) { return cplx(0); }), o);
    double err = 0.0;
    for (std::size_t i = 0; i < a.state.n(); ++i)
        if (std::fabs(a.state.x[i]) <= o.track_radius) err = std::max(err, std::abs(a.state.u[i] - b.state.u[i]));
    CHECK(err <= 1e-10);
}

TEST_CASE("a box too small for the horizon is rejected") {
    const PhysicalOptions o = small_box(1.0 / 32, 1.0, 0.8, 0.5);
    CHECK_THROWS_AS(evolve_physical(odd_state(OddProfile{}, o), o), DomainTooSmall);
    PhysicalOptions bad = small_box();
    bad.cfl = 1.2;
    CHECK_THROWS_AS(evolve_physical(odd_state(OddProfile{}, bad), bad), std::invalid_argument);
}

TEST_CASE("blow-up time fits recover synthetic laws") {
    std::vector<double> t, a, g;
    const double T = 1.2345;
    for (int i = 0; i < 400; ++i) {
        const double tt = T - 0.05 * std::pow(10.0, -2.0 * i / 399.0);
        t.push_back(tt);
        a.push_back(std::sqrt(2.0) / (T - tt));
        g.push_back(0.7 * std::pow(T - tt, -2.0) / std::sqrt(std::fabs(std::log(T - tt))));
    }
    const NodeFit f = fit_blowup_time(t, a, 3.0);
    CHECK(std::fabs(f.T - T) <= 1e-10);
    CHECK(f.conf <= 1e-9);
    const NodeFit h = fit_gradient_blowup(t, g, 3.0);
    CHECK(std::fabs(h.T - T) <= 1e-8);
}

TEST_CASE("odd data: geometry of the blow-up curve near the centre") {
    PhysicalOptions o = small_box(1.0 / 1024, 2.5, 2.0, 0.5);
    const CharacteristicReport r = characteristic_scan(OddProfile{}, o, 8, 24);
    REQUIRE(std::isfinite(r.T0));
    CHECK(r.lipschitz_pass);
    CHECK(r.corner_pass);
    CHECK(r.symmetry_pass);
    CHECK(std::isfinite(r.beta));
    // the curve peaks at the centre with slopes close to -+1
    for (std::size_t i = 0; i < r.curve.x.size(); ++i) {
        if (r.curve.x[i] == 0.0) continue;
        CHECK(r.curve.T[i] < r.T0 + r.T0_conf);
        const double s = 0.5 * (r.curve.slope_left[i] + r.curve.slope_right[i]);
        CHECK(std::fabs(s) < 1.0 + 0.05);
        CHECK(std::fabs(s) > 0.7);
    }
    CHECK(curve_rows(r.curve).size() == r.curve.x.size());
    CHECK(curve_header().size() == 5);
}

TEST_CASE("larger data blows up earlier (heuristic)") {
    PhysicalOptions o = small_box(1.0 / 512, 2.5, 2.0, 0.5);
    const PhysicalRun a = evolve_physical(odd_state(OddProfile{2.0, 0.5, 0.0}, o), o);
    const PhysicalRun b = evolve_physical(odd_state(OddProfile{2.3, 0.5, 0.0}, o), o);
    const std::size_t c = a.state.n() / 2;
    for (long off : {64L, 128L, 256L}) {
        REQUIRE(std::isfinite(a.fit[c + off].T));
        REQUIRE(std::isfinite(b.fit[c + off].T));
        CHECK(b.fit[c + off].T < a.fit[c + off].T);
    }
}

TEST_CASE("halving dx and dt moves T by less than its confidence") {
    PhysicalOptions coarse = small_box(1.0 / 1024, 2.5, 2.0, 0.5), fine = coarse;
    fine.dx = coarse.dx / 2;
    const CharacteristicReport a = characteristic_scan(OddProfile{}, coarse, 8, 24);
    const CharacteristicReport b = characteristic_scan(OddProfile{}, fine, 8, 24);
    REQUIRE(a.curve.x.size() == b.curve.x.size());
    int compared = 0;
    for (std::size_t i = 0; i < a.curve.x.size(); ++i) {
        // only points that are nodes of both grids
        if (a.curve.x[i] == 0.0 || a.curve.x[i] != b.curve.x[i]) continue;
        CHECK(std::fabs(a.curve.T[i] - b.curve.T[i]) <= a.curve.T_conf[i]);
        ++compared;
    }
    CHECK(compared >= 8);
}
