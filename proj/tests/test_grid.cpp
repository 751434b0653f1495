#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cwave/grid.hpp"
#include "cwave/soliton.hpp"

using namespace cwave;

TEST_CASE("build_grid rejects degenerate input") {
    CHECK_THROWS_AS(build_grid(1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 15), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(NAN, 64), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(INFINITY, 64), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 64), std::invalid_argument);
}

TEST_CASE("small odd grid has the expected nodes") {
    // the 3-node version of this is below the node floor; 17 keeps the
    // same endpoints and centre
    const MappedGrid g = build_grid(1.0, 17);
    CHECK(g.xi.front() == -1.0);
    CHECK(g.xi[8] == 0.0);
    CHECK(g.xi.back() == 1.0);
    CHECK(g.y.front() == doctest::Approx(-std::tanh(1.0)).epsilon(1e-15));
    CHECK(g.y[8] == 0.0);
    CHECK(g.y.back() == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("grid invariants") {
    for (int n : {1024, 1025}) {
        const MappedGrid g = build_grid(12.0, n);
        for (int m = 1; m < n; ++m) {
            CHECK(g.xi[m] > g.xi[m - 1]);
            REQUIRE(std::fabs(g.y[m]) < 1.0);
        }
        for (int m = 0; m < n; ++m) {
            CHECK(g.xi[m] == -g.xi[n - 1 - m]);
            // compare against 1 - y^2 where that subtraction is still accurate
            if (std::fabs(g.xi[m]) < 3.0) CHECK(g.sech2[m] == doctest::Approx(1.0 - g.y[m] * g.y[m]).epsilon(1e-14));
            const double ch = std::cosh(g.xi[m]);
            CHECK(g.sech2[m] == doctest::Approx(1.0 / (ch * ch)).epsilon(1e-13));
        }
        CHECK(g.sech2.front() == doctest::Approx(1.5100e-10).epsilon(1e-3));
        CHECK(g.sech2.back() == doctest::Approx(1.5100e-10).epsilon(1e-3));
        double mx = 0.0;
        for (double v : g.sech2) mx = std::max(mx, v);
        if (n % 2 == 1) CHECK(mx == 1.0);
        else CHECK(mx == doctest::Approx(1.0).epsilon(g.dxi * g.dxi));
    }
}

TEST_CASE("integrate: closed forms at p = 3") {
    const Space sp(build_grid(12.0, 1024), 3.0);
    const RVec one(sp.n(), 1.0), zero(sp.n(), 0.0);
    CHECK(integrate(one, MeasureKind::rho, sp) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(integrate(zero, MeasureKind::rho, sp) == 0.0);
    const RVec k0 = kappa_on(sp, 0.0);
    RVec k2(sp.n());
    for (std::size_t i = 0; i < k2.size(); ++i) k2[i] = k0[i] * k0[i];
    CHECK(integrate(k2, MeasureKind::rho, sp) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

    for (int n : {512, 1024, 2048})
        for (double X : {12.0, 14.0}) {
            const Space s2(build_grid(X, n), 3.0);
            const RVec o(s2.n(), 1.0);
            CHECK(std::fabs(integrate(o, MeasureKind::rho, s2) - 4.0 / 3.0) <= 1e-10);
            CHECK(std::fabs(integrate(o, MeasureKind::rho_over_one_minus_y2, s2) - 2.0) <= 1e-10);
            CHECK(std::fabs(integrate(o, MeasureKind::dy, s2) - 2.0) <= 1e-10);
        }
}

TEST_CASE("integrate: Beta-function oracle for other p") {
    // int (1-y^2)^al dy = sqrt(pi) Gamma(al+1)/Gamma(al+3/2)
    auto beta_int = [](double al) { return std::sqrt(M_PI) * std::tgamma(al + 1) / std::tgamma(al + 1.5); };
    for (double p : {1.5, 2.0, 2.5, 4.0}) {
        const Space sp(build_grid(16.0, 2048), p);
        const RVec one(sp.n(), 1.0);
        CHECK(integrate(one, MeasureKind::rho, sp) == doctest::Approx(beta_int(2.0 / (p - 1))).epsilon(1e-11));
        CHECK(integrate(one, MeasureKind::rho_over_one_minus_y2, sp) ==
              doctest::Approx(beta_int(2.0 / (p - 1) - 1)).epsilon(1e-9));
    }
}

TEST_CASE("integrate rejects bad input") {
    const Space sp(build_grid(12.0, 64), 3.0);
    RVec v(sp.n(), 1.0);
    v[3] = NAN;
    CHECK_THROWS_AS(integrate(v, MeasureKind::rho, sp), std::invalid_argument);
    CHECK_THROWS_AS(integrate(RVec(10, 1.0), MeasureKind::rho, sp), std::invalid_argument);
}

TEST_CASE("trapezoid error collapses under refinement") {
    // sech^3(xi - 0.3) e^{xi/2} against rho at p = 3; reference from a fine grid
    auto run = [](int n) {
        const Space sp(build_grid(12.0, n), 3.0);
        RVec f(sp.n());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = sp.grid.xi[i];
            f[i] = std::pow(1.0 / std::cosh(x - 0.3), 3) * std::exp(0.5 * x) * std::cosh(x) * std::cosh(x);
        }
        return integrate(f, MeasureKind::rho, sp);
    };
    const double ref = run(8193);
    const double e1 = std::fabs(run(48) - ref), e2 = std::fabs(run(96) - ref), e3 = std::fabs(run(192) - ref);
    CHECK(e2 / e1 < 0.05);
    CHECK(e3 < 1e-10);
}

TEST_CASE("inner_phi symmetry and positivity") {
    const Space sp(build_grid(12.0, 512), 3.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    auto field = [&]() {
        FieldPair q = FieldPair::zeros(sp.n());
        const double a = N(rng), b = N(rng), c = N(rng), e = N(rng);
        for (std::size_t i = 0; i < sp.n(); ++i) {
            const double x = sp.grid.xi[i];
            q.f1[i] = cplx(a * std::tanh(x - c) + b, N(rng) * 0.0 + e);
            q.f2[i] = cplx(b / std::cosh(x - e), a);
        }
        return q;
    };
    for (int t = 0; t < 20; ++t) {
        const FieldPair q = field(), r = field();
        CHECK(inner_phi(q, r, sp) == doctest::Approx(inner_phi(r, q, sp)).epsilon(1e-13));
        CHECK(inner_phi(q, q, sp) > 0.0);
    }
    CHECK(inner_phi(FieldPair::zeros(sp.n()), FieldPair::zeros(sp.n()), sp) == 0.0);
}

TEST_CASE("norms of solitons") {
    const Space sp(build_grid(14.0, 2048), 3.0);
    CHECK(norm_H(FieldPair::zeros(sp.n()), sp) == 0.0);
    FieldPair q = FieldPair::zeros(sp.n());
    const RVec k0 = kappa_on(sp, 0.0);
    for (std::size_t i = 0; i < sp.n(); ++i) q.f1[i] = k0[i];
    CHECK(norm_H(q, sp) * norm_H(q, sp) == doctest::Approx(8.0 / 3.0).epsilon(1e-11));
    double lo = 1e300, hi = 0.0;
    for (double d = -0.9; d <= 0.9001; d += 0.1) {
        const RVec k = kappa_on(sp, -std::atanh(d));
        for (std::size_t i = 0; i < sp.n(); ++i) q.f1[i] = k[i];
        const double nm = norm_H(q, sp);
        lo = std::min(lo, nm);
        hi = std::max(hi, nm);
    }
    CHECK(hi / lo < 3.0);
    CHECK(lo > 0.5);
}

TEST_CASE("chain-rule derivative converges") {
    // d_xi kappa = (1-y^2) d_y kappa, compared with kappa_ddiff-free closed form
    auto err = [](int n) {
        const Space sp(build_grid(12.0, n), 3.0);
        const double d = 0.4;
        CVec k(sp.n());
        for (std::size_t i = 0; i < sp.n(); ++i) k[i] = kappa(d, sp.grid.y[i], 3.0);
        const CVec dk = sp.d1.apply(k, Exec::serial);
        double e = 0.0;
        for (std::size_t i = 0; i < sp.n(); ++i) {
            const double y = sp.grid.y[i];
            const double exact = sp.grid.sech2[i] * (-d) * kappa(d, y, 3.0) / (1.0 + d * y);
            e = std::max(e, std::fabs(dk[i].real() - exact));
        }
        return e;
    };
    const double e1 = err(256), e2 = err(512);
    CHECK(e2 < e1 / 4.0);  // at least second order
    CHECK(e2 < 1e-5);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    const Space sp(build_grid(12.0, 4097), 3.0);
    CVec f(sp.n());
    RVec r(sp.n());
    for (std::size_t i = 0; i < sp.n(); ++i) {
        f[i] = cplx(std::sin(sp.grid.xi[i]), std::cos(3 * sp.grid.xi[i]));
        r[i] = std::exp(-sp.grid.xi[i] * sp.grid.xi[i]);
    }
    const CVec a = sp.d1.apply(f, Exec::serial), b = sp.d1.apply(f, Exec::parallel);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
    const double s1 = kern::dot(r.data(), sp.w_rho.data(), r.size(), Exec::serial);
    const double s2 = kern::dot(r.data(), sp.w_rho.data(), r.size(), Exec::parallel);
    CHECK(s1 == s2);
}

TEST_CASE("tail magnitude flags fields that do not decay against the weight") {
    const Space sp(build_grid(12.0, 512), 3.0);
    CVec v(sp.n(), 1.0);
    CHECK(tail_magnitude(v, MeasureKind::rho, sp) < 1e-19);
    for (std::size_t i = 0; i < sp.n(); ++i) v[i] = std::exp(4.0 * std::fabs(sp.grid.xi[i]));
    CHECK(tail_magnitude(v, MeasureKind::rho, sp) > 1.0);
}
