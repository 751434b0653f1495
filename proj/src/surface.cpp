#include "cwave/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline cplx nonlin(cplx u, double p) {
    if (p == 3.0) return std::norm(u) * u;
    const double m = std::abs(u);
    return m == 0.0 ? cplx(0.0) : std::pow(m, p - 1.0) * u;
}

// running sums for y = a + b (t - t_ref)
struct LineSums {
    double t_ref = 0.0;
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    void add(double t, double y) {
        if (n == 0) t_ref = t;
        const double x = t - t_ref;
        n += 1;
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
        syy += y * y;
    }
    // root of the fitted line and its delta-method standard error
    bool root(double& T, double& se) const {
        if (n < 5) return false;
        const double mx = st / n, my = sy / n;
        const double sxx = stt - n * mx * mx, sxy = sty - n * mx * my;
        if (!(sxx > 0)) return false;
        const double b = sxy / sxx;
        if (!(b < 0)) return false;  // y must fall towards the singular time
        const double a = my - b * mx;
        const double ss = std::max(0.0, syy - a * sy - b * sty);
        const double s2 = n > 2 ? ss / (n - 2) : 0.0;
        T = t_ref + mx - my / b;
        se = std::sqrt(s2 / n / (b * b) + my * my * (s2 / sxx) / (b * b * b * b));
        return std::isfinite(T);
    }
};

NodeFit combine(const LineSums& full, const LineSums& upper) {
    NodeFit f;
    f.samples = (int)full.n;
    double T, se;
    if (!full.root(T, se)) return f;
    f.T = T;
    f.conf = se;
    double Tu, seu;
    if (upper.root(Tu, seu)) f.conf += std::fabs(Tu - T);
    return f;
}

struct Line {
    double slope = 0, intercept = 0, rms = 0;
};

Line lsq(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
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
    L.slope = sxx > 0 ? sxy / sxx : NAN;
    L.intercept = my - L.slope * mx;
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r += std::pow(y[i] - L.intercept - L.slope * x[i], 2);
    L.rms = std::sqrt(r / n);
    return L;
}

}  // namespace

PhysicalState physical_state(const PhysicalOptions& opt, const std::function<cplx(double)>& u0,
                             const std::function<cplx(double)>& u1) {
    if (!(opt.dx > 0) || !(opt.half_width > 0)) throw std::invalid_argument("physical_state: bad grid");
    const double cells = opt.half_width / opt.dx;
    const long half = std::lround(cells);
    if (std::fabs(cells - half) > 1e-9 * cells || half < 2)
        throw std::invalid_argument("physical_state: half-width must be a multiple of dx");
    if (!(opt.p > 1.0)) throw std::invalid_argument("physical_state: need p > 1");
    PhysicalState st;
    st.dx = opt.dx;
    const std::size_t n = 2 * half + 1;
    st.x.resize(n);
    st.u.resize(n);
    st.ut.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        st.x[i] = ((long)i - half) * opt.dx;  // exactly symmetric
        st.u[i] = u0(st.x[i]);
        st.ut[i] = u1(st.x[i]);
    }
    return st;
}

PhysicalState odd_state(const OddProfile& prof, const PhysicalOptions& opt) {
    if (!(prof.width > 0)) throw std::invalid_argument("odd_state: width must be positive");
    const cplx e = std::polar(1.0, prof.phase);
    return physical_state(
        opt, [&](double x) { return e * prof.amplitude * std::tanh(x / prof.width); },
        [](double) { return cplx(0.0); });
}

void physical_rhs(const PhysicalState& st, const std::vector<char>& active, double p, CVec& out, Exec ex) {
    const long n = (long)st.n();
    out.resize(n);
    const double inv = 1.0 / (st.dx * st.dx);
    const cplx* u = st.u.data();
    const char* act = active.data();
    cplx* o = out.data();
    auto row = [&](long i) {
        if (!act[i]) {
            o[i] = 0.0;
            return;
        }
        const cplx l = i == 0 ? u[1] : u[i - 1];
        const cplx r = i == n - 1 ? u[n - 2] : u[i + 1];
        o[i] = (l - 2.0 * u[i] + r) * inv + nonlin(u[i], p);
    };
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) row(i);
    } else {
        for (long i = 0; i < n; ++i) row(i);
    }
}

void cone_deadlines(const std::vector<double>& freeze_time, double dx, std::vector<double>& deadline) {
    const std::size_t n = freeze_time.size();
    deadline.assign(freeze_time.begin(), freeze_time.end());
    for (std::size_t i = 1; i < n; ++i) deadline[i] = std::min(deadline[i], deadline[i - 1] + dx);
    for (std::size_t i = n - 1; i-- > 0;) deadline[i] = std::min(deadline[i], deadline[i + 1] + dx);
}

PhysicalRun evolve_physical(PhysicalState st, const PhysicalOptions& opt) {
    if (!(opt.cfl > 0 && opt.cfl <= 0.9)) throw std::invalid_argument("evolve_physical: need 0 < cfl <= 0.9");
    if (!(opt.fit_floor > 0 && opt.ceiling > opt.fit_floor))
        throw std::invalid_argument("evolve_physical: need 0 < fit_floor < ceiling");
    const double X = -st.x.front();
    if (X - opt.t_end < opt.track_radius)
        throw DomainTooSmall("evolve_physical: the ends reach |x| = " + std::to_string(X - opt.t_end) +
                             " by t_end, inside the tracked radius " + std::to_string(opt.track_radius));
    const std::size_t n = st.n();
    const Exec ex = opt.exec;
    const double p = opt.p;
    const double q = 0.5 * (p - 1.0);
    const double split = std::sqrt(opt.fit_floor * opt.ceiling);
    PhysicalRun run;
    std::vector<char> active(n, 1);
    run.freeze_time.assign(n, kInf);
    run.deadline.assign(n, kInf);
    std::vector<LineSums> full(n), upper(n);
    const std::size_t c = n / 2;
    std::vector<std::size_t> tracked;
    for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(st.x[i]) <= opt.track_radius) tracked.push_back(i);

    CVec k1u, k1v(n), k2u, k2v(n), k3u, k3v(n), k4u, k4v(n);
    PhysicalState tmp = st;
    const long ln = (long)n;
    auto stage = [&](const CVec& bu, const CVec& bv, const CVec* du, const CVec* dv, double h, CVec& ou,
                     CVec& ov) {
        // tmp = base + h * (du, dv); (ou, ov) = f(tmp)
        if (du) {
            auto upd = [&](long i) {
                tmp.u[i] = bu[i] + h * (*du)[i];
                tmp.ut[i] = bv[i] + h * (*dv)[i];
            };
            if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
                for (long i = 0; i < ln; ++i) upd(i);
            } else {
                for (long i = 0; i < ln; ++i) upd(i);
            }
        } else {
            tmp.u = bu;
            tmp.ut = bv;
        }
        ou = tmp.ut;
        for (std::size_t i = 0; i < n; ++i)
            if (!active[i]) ou[i] = 0.0;
        physical_rhs(tmp, active, p, ov, ex);
    };

    while (st.t < opt.t_end) {
        double umax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i]) umax = std::max(umax, std::abs(st.u[i]));
        double dt = opt.cfl * st.dx;
        if (umax > 0) dt = std::min(dt, opt.eta / std::pow(umax, q));
        dt = std::min(dt, opt.t_end - st.t);
        run.hist_t.push_back(st.t);
        run.hist_max.push_back(umax);
        if (active[c] && active[c - 1] && active[c + 1]) {
            run.grad0_t.push_back(st.t);
            run.grad0.push_back(std::abs(st.u[c + 1] - st.u[c - 1]) / (2 * st.dx));
        }

        stage(st.u, st.ut, nullptr, nullptr, 0.0, k1u, k1v);
        stage(st.u, st.ut, &k1u, &k1v, 0.5 * dt, k2u, k2v);
        stage(st.u, st.ut, &k2u, &k2v, 0.5 * dt, k3u, k3v);
        stage(st.u, st.ut, &k3u, &k3v, dt, k4u, k4v);
        auto fin = [&](long i) {
            st.u[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            st.ut[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        };
        if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < ln; ++i) fin(i);
        } else {
            for (long i = 0; i < ln; ++i) fin(i);
        }
        st.t += dt;
        ++run.steps;

        bool froze = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            const double a = std::abs(st.u[i]);
            if (!std::isfinite(a)) throw SurfaceError("evolve_physical: non-finite value at x = " + std::to_string(st.x[i]));
            if (a >= opt.fit_floor && a <= opt.ceiling) {
                const double y = std::pow(a, -q);
                full[i].add(st.t, y);
                if (a >= split) upper[i].add(st.t, y);
            }
            if (a > opt.ceiling) {
                active[i] = 0;
                run.freeze_time[i] = st.t;
                ++run.frozen;
                froze = true;
            }
        }
        if (froze) cone_deadlines(run.freeze_time, st.dx, run.deadline);
        if (run.frozen > 0)
            for (std::size_t i = 0; i < n; ++i)
                if (active[i] && st.t >= run.deadline[i]) active[i] = 0;
        bool any = false;
        for (std::size_t i : tracked) any = any || active[i];
        if (!any) break;
    }
    run.fit.resize(n);
    for (std::size_t i = 0; i < n; ++i) run.fit[i] = combine(full[i], upper[i]);
    run.state = std::move(st);
    return run;
}

NodeFit fit_blowup_time(const std::vector<double>& t, const std::vector<double>& amp, double p) {
    if (t.size() != amp.size()) throw std::invalid_argument("fit_blowup_time: size mismatch");
    double top = 0;
    for (double a : amp) top = std::max(top, a);
    LineSums full, upper;
    const double q = 0.5 * (p - 1.0), lo = top / 10.0, mid = top / std::sqrt(10.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (amp[i] < lo) continue;
        full.add(t[i], std::pow(amp[i], -q));
        if (amp[i] >= mid) upper.add(t[i], std::pow(amp[i], -q));
    }
    return combine(full, upper);
}

NodeFit fit_gradient_blowup(const std::vector<double>& t, const std::vector<double>& g, double p) {
    if (t.size() != g.size()) throw std::invalid_argument("fit_gradient_blowup: size mismatch");
    NodeFit out;
    double top = 0;
    for (double v : g) top = std::max(top, v);
    if (!(top > 0)) return out;
    const double r = (p - 1.0) / (p + 1.0);
    auto fit_window = [&](double decades, double& se) {
        const double lo = top * std::pow(10.0, -decades);
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (g[i] >= lo) idx.push_back(i);
        if (idx.size() < 8) return (double)NAN;
        const double t_last = t[idx.back()];
        double T = NAN;
        {
            LineSums L;
            for (std::size_t i : idx) L.add(t[i], std::pow(g[i], -r));
            if (!L.root(T, se)) return (double)NAN;
        }
        // fixed point on the log correction
        for (int it = 0; it < 200; ++it) {
            const double Tg = std::max(T, t_last + 1e-12);
            LineSums L;
            for (std::size_t i : idx) {
                const double lg = std::fabs(std::log(Tg - t[i]));
                L.add(t[i], std::pow(g[i] * std::sqrt(lg), -r));
            }
            double Tn;
            if (!L.root(Tn, se)) return (double)NAN;
            const bool done = std::fabs(Tn - T) < 1e-13;
            T = Tn;
            if (done) break;
        }
        return T;
    };
    double se1, se2;
    const double T1 = fit_window(1.5, se1), T2 = fit_window(1.0, se2);
    if (!std::isfinite(T1)) return out;
    out.T = T1;
    out.conf = se1 + (std::isfinite(T2) ? std::fabs(T2 - T1) : 0.0);
    out.samples = (int)t.size();
    return out;
}

CharacteristicReport analyse_curve(const PhysicalRun& run_in, const PhysicalOptions& opt, int m_lo, int m_hi,
                                   const PhysicalRun* coarse) {
    CharacteristicReport rep;
    rep.steps = run_in.steps;
    const PhysicalState& st = run_in.state;
    const std::size_t n = st.n(), c = n / 2;
    const double dx = st.dx;
    PhysicalRun run_aug;
    const PhysicalRun* rp = &run_in;
    double T0_extra = 0.0;
    if (coarse) {
        const std::size_t cn = coarse->state.n(), cc = cn / 2;
        if (std::fabs(coarse->state.dx - 2 * dx) > 1e-15 * dx || cn - 1 != (n - 1) / 2)
            throw std::invalid_argument("analyse_curve: coarse run must be the same box at 2 dx");
        run_aug.state = run_in.state;
        run_aug.fit = run_in.fit;
        run_aug.grad0_t = run_in.grad0_t;
        run_aug.grad0 = run_in.grad0;
        rep.steps += coarse->steps;
        // coarse value at each fine node: exact on shared nodes, linear in between
        for (std::size_t i = 0; i < n; ++i) {
            NodeFit& f = run_aug.fit[i];
            if (!std::isfinite(f.T)) continue;
            const long off = (long)i - (long)c;
            double Tc;
            if (off % 2 == 0) {
                Tc = coarse->fit[cc + off / 2].T;
            } else {
                const long a = (long)cc + (long)std::floor(off / 2.0);
                Tc = 0.5 * (coarse->fit[a].T + coarse->fit[a + 1].T);
            }
            if (std::isfinite(Tc)) f.conf += std::fabs(f.T - Tc) / 3.0;
            else f.T = NAN;  // no discretisation estimate, no value
        }
        const NodeFit gf = fit_gradient_blowup(run_in.grad0_t, run_in.grad0, opt.p);
        const NodeFit gc = fit_gradient_blowup(coarse->grad0_t, coarse->grad0, opt.p);
        T0_extra = std::fabs(gf.T - gc.T) / 3.0;
        rp = &run_aug;
    }
    const PhysicalRun& run = *rp;
    auto valid = [&](std::size_t i) {
        return std::fabs(st.x[i]) <= opt.track_radius && std::isfinite(run.fit[i].T);
    };
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < n; ++i)
        if (valid(i)) nodes.push_back(i);
    if (nodes.size() < 16) throw NoBlowup("characteristic_scan: no blow-up detected inside the tracked radius");

    const NodeFit g0 = fit_gradient_blowup(run.grad0_t, run.grad0, opt.p);
    rep.T0 = g0.T;
    rep.T0_conf = g0.conf + T0_extra;

    // 1-Lipschitz over a few pair separations
    rep.lipschitz_worst = -kInf;
    for (std::size_t sep : {1, 4, 16, 64, 256})
        for (std::size_t i : nodes) {
            const std::size_t j = i + sep;
            if (j >= n || !valid(j)) continue;
            const double tol = run.fit[i].conf + run.fit[j].conf;
            const double v = std::fabs(run.fit[i].T - run.fit[j].T) - sep * dx - tol;
            rep.lipschitz_worst = std::max(rep.lipschitz_worst, v);
        }
    rep.lipschitz_pass = rep.lipschitz_worst <= 0.0;

    rep.corner_margin = kInf;
    rep.symmetry_worst = -kInf;
    for (std::size_t i : nodes) {
        if (i == c) continue;
        const double ax = std::fabs(st.x[i]);
        if (std::isfinite(rep.T0)) {
            const double m = run.fit[i].T - (rep.T0 - ax) + run.fit[i].conf + rep.T0_conf;
            rep.corner_margin = std::min(rep.corner_margin, m);
        }
        const std::size_t j = 2 * c - i;
        if (valid(j))
            rep.symmetry_worst = std::max(rep.symmetry_worst, std::fabs(run.fit[i].T - run.fit[j].T) -
                                                                  (run.fit[i].conf + run.fit[j].conf));
    }
    rep.corner_pass = std::isfinite(rep.T0) && rep.corner_margin >= 0.0;
    rep.symmetry_pass = rep.symmetry_worst <= 0.0;

    // local least-squares slope of T over nodes in [a, b]
    auto slope = [&](double a, double b) {
        std::vector<double> xs, ts;
        const long ia = std::max(0L, (long)std::ceil((a - st.x[0]) / dx - 1e-9));
        const long ib = std::min((long)n - 1, (long)std::floor((b - st.x[0]) / dx + 1e-9));
        for (long i = ia; i <= ib; ++i)
            if (valid(i)) {
                xs.push_back(st.x[i]);
                ts.push_back(run.fit[i].T);
            }
        if (xs.size() < 3) return (double)NAN;
        return lsq(xs, ts).slope;
    };

    BlowupCurve& cv = rep.curve;
    std::vector<double> xs;
    for (int m = m_hi; m >= m_lo; --m) xs.push_back(-std::pow(2.0, -m / 4.0));
    xs.push_back(0.0);
    for (int m = m_hi; m >= m_lo; --m) xs.push_back(std::pow(2.0, -m / 4.0));
    std::vector<double> lx, lg;
    std::vector<double> gap_pos(m_hi - m_lo + 1, NAN), gap_neg(m_hi - m_lo + 1, NAN);
    for (double x : xs) {
        if (std::fabs(x) > opt.track_radius) continue;
        const std::size_t i = (std::size_t)std::lround((x - st.x[0]) / dx);
        const double h = std::max(0.125 * std::fabs(x), 4 * dx);
        cv.x.push_back(st.x[i]);
        if (i == c) {
            cv.T.push_back(rep.T0);
            cv.T_conf.push_back(rep.T0_conf);
        } else {
            cv.T.push_back(run.fit[i].T);
            cv.T_conf.push_back(run.fit[i].conf);
        }
        cv.slope_left.push_back(slope(st.x[i] - h, st.x[i]));
        cv.slope_right.push_back(slope(st.x[i], st.x[i] + h));
    }
    // slope law on 1 - |T'|, both signs averaged
    for (int m = m_lo; m <= m_hi; ++m) {
        const double x = std::pow(2.0, -m / 4.0);
        if (x > opt.track_radius) continue;
        const double h = 0.125 * x;
        if (h < 4 * dx) continue;
        const double sp = slope(x - h, x + h), sn = slope(-x - h, -x + h);
        if (!std::isfinite(sp) || !std::isfinite(sn)) continue;
        const double gap = 1.0 - 0.5 * (std::fabs(sp) + std::fabs(sn));
        rep.law_x.push_back(x);
        rep.law_gap.push_back(gap);
        if (gap > 0) {
            lx.push_back(std::log(-std::log(x)));
            lg.push_back(std::log(gap));
        }
    }
    rep.beta_target = 0.5 * (opt.p - 1.0);  // (k - 1)(p - 1)/2 with k = 2
    if (lx.size() >= 4) {
        const Line L = lsq(lx, lg);
        rep.beta = -L.slope;
        rep.gamma = std::exp(L.intercept);
        rep.beta_fit_rms = L.rms;
        rep.beta_pass = std::fabs(rep.beta - rep.beta_target) <= 0.5 * rep.beta_target;
    }
    return rep;
}

CharacteristicReport characteristic_scan(const OddProfile& prof, const PhysicalOptions& opt, int m_lo, int m_hi) {
    const PhysicalRun fine = evolve_physical(odd_state(prof, opt), opt);
    if (!opt.richardson) return analyse_curve(fine, opt, m_lo, m_hi);
    PhysicalOptions co = opt;
    co.dx = 2 * opt.dx;
    const PhysicalRun coarse = evolve_physical(odd_state(prof, co), co);
    return analyse_curve(fine, opt, m_lo, m_hi, &coarse);
}

std::vector<std::string> curve_header() { return {"x", "T", "T_conf", "Tslope_left", "Tslope_right"}; }

std::vector<std::vector<double>> curve_rows(const BlowupCurve& c) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < c.x.size(); ++i)
        rows.push_back({c.x[i], c.T[i], c.T_conf[i], c.slope_left[i], c.slope_right[i]});
    return rows;
}

}  // namespace cwave
