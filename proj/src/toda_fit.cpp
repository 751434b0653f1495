#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cwave/toda.hpp"

namespace cwave {

namespace {

struct Line {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

// ordinary least squares y = intercept + slope x
Line lsq(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line L;
    L.slope = sxx > 0 ? sxy / sxx : 0.0;
    L.intercept = my - L.slope * mx;
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r += std::pow(y[i] - L.intercept - L.slope * x[i], 2);
    L.rms = std::sqrt(r / n);
    return L;
}

double norm2(const RVec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

AsymptoticFit fit_asymptotics(const Trajectory& t, double A, const FitOptions& opt) {
    if (t.samples.size() < 8) throw std::invalid_argument("fit_asymptotics: trajectory too short");
    const int k = t.k;
    const double p = t.p;
    const double s0 = t.samples.front().s, s1 = t.samples.back().s;
    if (std::log10(s1 / s0) < opt.min_span_decades - 1e-9)
        throw std::invalid_argument("fit_asymptotics: trajectory spans fewer than " + std::to_string(opt.min_span_decades) +
                                    " decades in s");
    const DirichletOps D = dirichlet_ops(k);
    AsymptoticFit f;
    f.k = k;
    f.p = p;
    f.s_hi = s1;
    f.s_lo = s1 * std::pow(10.0, -opt.window_decades);
    f.kappa.resize(k);
    for (int j = 0; j < k; ++j) f.kappa[j] = 0.5 * (p - 1.0) * (j + 1 - 0.5 * (k + 1));
    f.alpha_closed = toda_selfsimilar_alpha(k, p, A);
    f.sE_target = (p - 1.0) / (2.0 * A * D.c0);
    const double A0 = 2.0 * A * D.c0 * D.F0() / (p - 1.0);

    std::vector<const TodaSample*> win;
    for (const TodaSample& s : t.samples)
        if (s.s >= f.s_lo * (1 - 1e-12)) win.push_back(&s);
    if (win.size() < 5) throw std::invalid_argument("fit_asymptotics: fewer than 5 samples in the fit window");
    {
        const RVec& z = win.front()->zeta;
        for (int j = 0; j + 1 < k; ++j)
            if (z[j + 1] - z[j] < opt.min_gap)
                throw std::invalid_argument("fit_asymptotics: gap below " + std::to_string(opt.min_gap) +
                                            " at the start of the fit window");
    }

    std::vector<double> lx, ly, bin_s, ls_all, a1;
    std::vector<std::vector<double>> resid(k);
    double band_lo = 1e300, band_hi = -1e300, F_prev = 0.0;
    for (std::size_t i = 0; i < win.size(); ++i) {
        const TodaSample& s = *win[i];
        const GapCoords g = gap_coords(s.zeta, s.theta, p, D);
        RVec dz(D.m()), db(D.m());
        for (int j = 0; j < D.m(); ++j) {
            dz[j] = g.z[j] - D.z_cr[j];
            db[j] = std::remainder(g.b[j] - M_PI, 2 * M_PI);
        }
        const double rr = g.r - std::log(A0 * s.s);
        const double dist = std::fabs(rr) + norm2(dz) + norm2(db);
        // the distance can oscillate through zero under perturbation, so the
        // power law is fitted to its maximum over quarter-decade bins
        const int bin = (int)std::floor(4.0 * std::log10(s.s / f.s_lo) + 1e-9);
        if (lx.empty() || bin != (int)lx.back()) {
            lx.push_back(bin);
            ly.push_back(dist);
            bin_s.push_back(s.s);
        } else if (dist > ly.back()) {
            ly.back() = dist;
            bin_s.back() = s.s;
        }
        ls_all.push_back(std::log(s.s));
        a1.push_back(g.a[0]);
        for (int j = 0; j < k; ++j) resid[j].push_back(s.zeta[j] - f.kappa[j] * std::log(s.s));
        for (double a : g.a) {
            band_lo = std::min(band_lo, a - std::log(s.s));
            band_hi = std::max(band_hi, a - std::log(s.s));
        }
        const double F = lyapunov_F(g.z, g.b);
        if (i > 0 && F > F_prev + 1e-9 * std::fabs(F_prev)) f.F_monotone = false;
        F_prev = F;
        f.s_window.push_back(s.s);
        if (i + 1 == win.size()) {
            f.b_dist_end = norm2(db);
            f.z_dist_end = norm2(dz);
            f.r_residual_end = rr;
            f.sE_end = s.s * lyapunov_E(s.zeta, s.theta, p);
            f.b_limit.resize(D.m());
            for (int j = 0; j < D.m(); ++j) f.b_limit[j] = std::fmod(std::fmod(g.b[j], 2 * M_PI) + 2 * M_PI, 2 * M_PI);
        }
    }
    f.band_width = band_hi - band_lo;
    f.band_ok = std::isfinite(f.band_width) && f.band_width < 10.0;
    f.gap_slope = lsq(ls_all, a1).slope;

    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < ly.size(); ++i)
        if (ly[i] > 1e-11) {  // below this the distance is integrator noise
            fx.push_back(std::log(bin_s[i]));
            fy.push_back(std::log(ly[i]));
        }
    if (fx.size() >= 4) {
        const Line L = lsq(fx, fy);
        f.delta = -L.slope;
        f.delta_fit_rms = L.rms;
    } else {
        f.delta = NAN;  // already at the noise floor over the whole window
    }

    // limits: zeta_j - kappa_j log s = L_j + c s^{-delta}
    f.alpha.resize(k);
    for (int j = 0; j < k; ++j) {
        std::vector<double> x(win.size());
        for (std::size_t i = 0; i < win.size(); ++i)
            x[i] = (std::isfinite(f.delta) && f.delta > 0) ? std::pow(win[i]->s, -f.delta) : 0.0;
        f.alpha[j] = (std::isfinite(f.delta) && f.delta > 0) ? lsq(x, resid[j]).intercept : resid[j].back();
    }
    double m = 0.0;
    for (double a : f.alpha) m += a;
    f.zeta00 = m / k;
    for (double& a : f.alpha) a -= f.zeta00;
    f.zeta_residual.resize(win.size());
    for (std::size_t i = 0; i < win.size(); ++i) {
        f.zeta_residual[i].resize(k);
        for (int j = 0; j < k; ++j) f.zeta_residual[i][j] = resid[j][i];
    }

    // theta_j - j pi, circular mean at the end
    double cs = 0, sn = 0;
    const TodaSample& last = *win.back();
    for (int j = 0; j < k; ++j) {
        const double v = last.theta[j] - (j + 1) * M_PI;
        cs += std::cos(v);
        sn += std::sin(v);
    }
    f.theta00 = std::atan2(sn, cs);
    return f;
}

}  // namespace cwave
