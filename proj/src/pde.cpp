#include "cwave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cwave/banded.hpp"

namespace cwave {

namespace {

// sum_j e^{i theta_j} kappa_j^p and the analytic xi-derivative of K
struct Background {
    CVec K, Kp, Kxi;
};

Background background(const Space& sp, const SolitonConfig& bg) {
    const std::size_t n = sp.n();
    Background b{CVec(n), CVec(n), CVec(n)};
    const double a = 2.0 / (sp.p - 1.0);
    for (int j = 0; j < bg.k(); ++j) {
        const RVec kap = kappa_on(sp, bg.zeta[j]);
        const cplx ph = std::polar(1.0, bg.theta[j]);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = sp.grid.xi[i];
            b.K[i] += ph * kap[i];
            b.Kp[i] += ph * std::pow(kap[i], sp.p);
            b.Kxi[i] += ph * (kap[i] * a * (sp.grid.y[i] - std::tanh(xi - bg.zeta[j])));
        }
    }
    return b;
}

RVec sponge_profile(const Space& sp, const PdeOptions& o) {
    RVec s(sp.n(), 0.0);
    const double X = sp.grid.half_width;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::fabs(sp.grid.xi[i]) - (X - o.sponge_width);
        if (d > 0 && o.sponge_width > 0) s[i] = o.sponge_strength * (d / o.sponge_width) * (d / o.sponge_width);
    }
    return s;
}

inline cplx power_term(cplx w, double p) {
    const double m = std::abs(w);
    return m == 0.0 ? cplx(0.0) : std::pow(m, p - 1.0) * w;
}

// linear part of the v equation, without the background and nonlinearity
CVec linear_v(const Space& sp, const CVec& u, const CVec& v, const RVec* sponge) {
    const Physics ph(sp.p);
    const CVec Lu = apply_L(sp, u);
    const CVec vx = sp.d1.apply(v, default_exec());
    CVec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double shch = sp.grid.y[i] / sp.grid.sech2[i];
        const double damp = ph.gamma + (sponge ? (*sponge)[i] : 0.0);
        out[i] = Lu[i] - ph.c * u[i] - damp * v[i] - 2.0 * shch * vx[i];
    }
    return out;
}

void check_finite(const PdeState& st) {
    for (std::size_t i = 0; i < st.u.size(); ++i)
        if (!std::isfinite(st.u[i].real()) || !std::isfinite(st.u[i].imag()) || !std::isfinite(st.v[i].real()) ||
            !std::isfinite(st.v[i].imag()))
            throw NonFiniteState("non-finite field value at node " + std::to_string(i) + ", s = " +
                                 std::to_string(st.s));
}

}  // namespace

double default_half_width(const SolitonConfig& cfg) {
    double m = 0.0;
    for (double z : cfg.zeta) m = std::max(m, std::fabs(z));
    return 12.0 + m;
}

CVec PdeState::w(const Space& sp) const {
    CVec out = u;
    if (bg.k() > 0) {
        const CVec K = multisoliton_K(bg, sp);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += K[i];
    }
    return out;
}

PdeState multisoliton_state(const Space& sp, const SolitonConfig& cfg, double s) {
    cfg.validate();
    PdeState st;
    st.s = s;
    st.bg = cfg;
    st.u.assign(sp.n(), 0.0);
    st.v.assign(sp.n(), 0.0);
    return st;
}

PdeState raw_state(const CVec& w, const CVec& v, double s) {
    if (w.size() != v.size()) throw std::invalid_argument("raw_state: w and v differ in length");
    PdeState st;
    st.s = s;
    st.u = w;
    st.v = v;
    return st;
}

PdeRhs pde_rhs(const Space& sp, const PdeState& st, const PdeOptions* opts) {
    if (st.u.size() != sp.n() || st.v.size() != sp.n()) throw std::invalid_argument("pde_rhs: field size");
    check_finite(st);
    const Background b = background(sp, st.bg);
    std::unique_ptr<RVec> sponge;
    if (opts) sponge = std::make_unique<RVec>(sponge_profile(sp, *opts));
    PdeRhs r;
    r.dw = st.v;
    r.dv = linear_v(sp, st.u, st.v, sponge.get());
    for (std::size_t i = 0; i < sp.n(); ++i) r.dv[i] += power_term(b.K[i] + st.u[i], sp.p) - b.Kp[i];
    return r;
}

double pde_energy(const Space& sp, const PdeState& st) {
    const Physics ph(sp.p);
    const Background b = background(sp, st.bg);
    const CVec ux = sp.d1.apply(st.u, default_exec());
    RVec e0(sp.n()), e1(sp.n());
    for (std::size_t i = 0; i < sp.n(); ++i) {
        const cplx w = b.K[i] + st.u[i];
        const double m2 = std::norm(w);
        e0[i] = 0.5 * std::norm(st.v[i]) + 0.5 * ph.c * m2 - std::pow(m2, 0.5 * (sp.p + 1.0)) / (sp.p + 1.0);
        e1[i] = 0.5 * std::norm(b.Kxi[i] + ux[i]);
    }
    return integrate(e0, MeasureKind::rho, sp) + integrate(e1, MeasureKind::rho_over_one_minus_y2, sp);
}

double pde_dissipation(const Space& sp, const CVec& v) {
    RVec m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m[i] = std::norm(v[i]);
    return 4.0 / (sp.p - 1.0) * integrate(m, MeasureKind::rho_over_one_minus_y2, sp);
}

// ---- Crank-Nicolson ----

struct CNStepper::Impl {
    const Space& sp;
    Background bg;
    RVec sponge;
    RVec row_scale;  // equilibration of the v rows
    double bc_scale[2] = {0.0, 0.0};
    std::unique_ptr<BandLU> lu;
    explicit Impl(const Space& s) : sp(s) {}
};

namespace {

// (col, weight) pairs of a stencil row in difference form
std::vector<std::pair<int, double>> stencil_row(const DiffOp& d, int i) {
    std::vector<std::pair<int, double>> out;
    double sum = 0.0;
    for (int k = 0; k < d.width; ++k) {
        const double w = d.w[(std::size_t)i * d.width + k];
        out.emplace_back(d.start[i] + k, w);
        sum += w;
    }
    out.emplace_back(i, -sum);
    return out;
}

// speed of the characteristic leaving the line at this end
double outgoing_speed(double xi) {
    const double ls = log_sech(xi);
    // cosh xi (sinh xi +- cosh xi) = e^{+-xi} cosh xi, overflow-free
    return xi >= 0 ? std::exp(xi - ls) : -std::exp(-xi - ls);
}

// minus the boundary condition evaluated at the old state (delta form)
cplx bc_residual(const DiffOp& d1, const CVec& u, const CVec& v, int i, double scale) {
    cplx ux = 0.0;
    for (auto [c, w] : stencil_row(d1, i)) ux += w * u[c];
    return -(scale * v[i] + (i == 0 ? -1.0 : 1.0) * ux);
}

}  // namespace

CNStepper::CNStepper(const Space& sp, const PdeOptions& opt, const SolitonConfig& bg)
    : impl_(new Impl(sp)), opt_(opt) {
    if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) {
        delete impl_;
        throw std::invalid_argument("CNStepper: dt must be positive");
    }
    Impl& I = *impl_;
    I.bg = background(sp, bg);
    I.sponge = sponge_profile(sp, opt);
    const Physics ph(sp.p);
    const int n = (int)sp.n();
    int off = 0;
    for (const DiffOp* d : {&sp.d1, &sp.d2})
        for (int i = 0; i < n; ++i)
            off = std::max({off, std::abs(d->start[i] - i), std::abs(d->start[i] + d->width - 1 - i)});
    const int bw = 2 * off + 1;
    BandMatrix A(2 * n, bw, bw);
    const double h = 0.5 * opt.dt;
    I.row_scale.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        const int U = 2 * i, V = 2 * i + 1;
        if (i == 0 || i == n - 1) {
            // absorbing end: the incoming characteristic variable
            // v + lambda_out u_xi vanishes, lambda_out = cosh(sinh +- cosh)
            // is the outgoing speed.  Row divided by lambda_out.
            A.add(U, U, 1.0);
            A.add(U, V, -h);
            const double lam = std::fabs(outgoing_speed(sp.grid.xi[i]));
            I.bc_scale[i == 0 ? 0 : 1] = 1.0 / lam;
            A.add(V, V, 1.0 / lam);
            for (auto [c, w] : stencil_row(sp.d1, i)) A.add(V, 2 * c, w * (i == 0 ? -1.0 : 1.0));
            continue;
        }
        A.add(U, U, 1.0);
        A.add(U, V, -h);
        std::vector<std::pair<int, double>> row;
        const double ch2 = 1.0 / sp.grid.sech2[i], y = sp.grid.y[i];
        for (auto [c, w] : stencil_row(sp.d2, i)) row.emplace_back(2 * c, ch2 * w);
        for (auto [c, w] : stencil_row(sp.d1, i)) row.emplace_back(2 * c, -ch2 * sp.beta * y * w);
        for (auto [c, w] : stencil_row(sp.d1, i)) row.emplace_back(2 * c + 1, -2.0 * y * ch2 * w);
        row.emplace_back(U, -ph.c);
        row.emplace_back(V, -(ph.gamma + I.sponge[i]));
        double big = 1.0;
        for (auto& [c, w] : row) big = std::max(big, std::fabs(h * w));
        const double sc = 1.0 / big;
        I.row_scale[i] = sc;
        A.add(V, V, sc);
        for (auto [c, w] : row) A.add(V, c, -h * w * sc);
    }
    I.lu = std::make_unique<BandLU>(A);
}

CNStepper::~CNStepper() { delete impl_; }

StepInfo CNStepper::step(PdeState& st) const {
    const Impl& I = *impl_;
    const Space& sp = I.sp;
    const int n = (int)sp.n();
    const double dt = opt_.dt;
    // explicit linear part at the old state
    const CVec lv = linear_v(sp, st.u, st.v, &I.sponge);
    CVec du(n, 0.0), dv(n, 0.0);
    std::vector<double> rhs(4 * (std::size_t)n);
    StepInfo info;
    const double D0 = pde_dissipation(sp, st.v);
    double prev = -1.0;
    for (int it = 0; it < opt_.picard_max; ++it) {
        info.picard_iterations = it + 1;
        for (int i = 0; i < n; ++i) {
            const int U = 2 * i, V = 2 * i + 1;
            if (i == 0 || i == n - 1) {
                const cplx ru = dt * st.v[i];
                const cplx rb = bc_residual(sp.d1, st.u, st.v, i, I.bc_scale[i == 0 ? 0 : 1]);
                rhs[U] = ru.real();
                rhs[2 * n + U] = ru.imag();
                rhs[V] = rb.real();
                rhs[2 * n + V] = rb.imag();
                continue;
            }
            const cplx mid = I.bg.K[i] + st.u[i] + 0.5 * du[i];
            const cplx N = power_term(mid, sp.p) - I.bg.Kp[i];
            const cplx ru = dt * st.v[i];
            const cplx rv = dt * (lv[i] + N) * I.row_scale[i];
            rhs[U] = ru.real();
            rhs[V] = rv.real();
            rhs[2 * n + U] = ru.imag();
            rhs[2 * n + V] = rv.imag();
        }
        I.lu->solve(rhs, 2);
        double change = 0.0, size = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx nu(rhs[2 * i], rhs[2 * n + 2 * i]), nv(rhs[2 * i + 1], rhs[2 * n + 2 * i + 1]);
            change = std::max(change, std::max(std::abs(nu - du[i]), std::abs(nv - dv[i])));
            size = std::max(size, std::max(std::abs(nu), std::abs(nv)));
            du[i] = nu;
            dv[i] = nv;
        }
        const double scale = std::max(size, dt);
        if (change <= opt_.picard_tol * scale) break;
        // round-off plateau: contraction has stopped well below any useful level
        if (it >= 3 && change >= 0.5 * prev && change <= 1e-9 * scale) break;
        if (it == opt_.picard_max - 1)
            throw PdeError("Crank-Nicolson fixed point did not converge at s = " + std::to_string(st.s) +
                           " (last change " + std::to_string(change) + "); reduce dt");
        prev = change;
    }
    for (int i = 0; i < n; ++i) {
        st.u[i] += du[i];
        st.v[i] += dv[i];
    }
    st.s += dt;
    check_finite(st);
    info.dissipation = 0.5 * dt * (D0 + pde_dissipation(sp, st.v));
    return info;
}

double sponge_content(const Space& sp, const PdeState& st, const PdeOptions& opt) {
    const Background b = background(sp, st.bg);
    const CVec ux = sp.d1.apply(st.u, default_exec());
    const double edge = sp.grid.half_width - opt.sponge_width;
    double acc = 0.0;
    for (std::size_t i = 0; i < sp.n(); ++i)
        if (std::fabs(sp.grid.xi[i]) >= edge)
            acc += 0.5 * (sp.w_rho1[i] * std::norm(b.Kxi[i] + ux[i]) + sp.w_rho[i] * std::norm(st.v[i]));
    return acc;
}

void evolve(const Space& sp, PdeState& st, double s_end, double sample_every, const PdeOptions& opt,
            const std::function<void(PdeState&, const EvolveSample&)>& cb) {
    if (!(sample_every > 0.0)) throw std::invalid_argument("evolve: sample spacing must be positive");
    if (st.u.size() != sp.n() || st.v.size() != sp.n()) throw std::invalid_argument("evolve: field size");
    const CNStepper stepper(sp, opt, st.bg);
    const int per_sample = std::max(1, (int)std::lround(sample_every / opt.dt));
    if (std::fabs(per_sample * opt.dt - sample_every) > 1e-9 * sample_every)
        throw std::invalid_argument("evolve: sample spacing must be a multiple of dt");
    const long total = std::lround((s_end - st.s) / opt.dt);
    EvolveSample smp;
    auto emit = [&](int max_picard) {
        const double tail = sponge_content(sp, st, opt);
        if (tail > opt.tail_threshold)
            throw ContainmentBreach("energy " + std::to_string(tail) + " inside the sponge at s = " +
                                    std::to_string(st.s));
        smp.state = st;
        smp.E = pde_energy(sp, st);
        smp.max_picard = max_picard;
        cb(st, smp);
    };
    emit(0);
    int max_picard = 0;
    for (long step = 1; step <= total; ++step) {
        const StepInfo inf = stepper.step(st);
        smp.dissipated += inf.dissipation;
        max_picard = std::max(max_picard, inf.picard_iterations);
        if (step % per_sample == 0 || step == total) {
            emit(max_picard);
            max_picard = 0;
        }
    }
}

std::vector<EvolveSample> evolve(const Space& sp, const PdeState& st0, double s_end, double sample_every,
                                 const PdeOptions& opt) {
    PdeState st = st0;
    std::vector<EvolveSample> out;
    evolve(sp, st, s_end, sample_every, opt, [&](PdeState&, const EvolveSample& s) { out.push_back(s); });
    return out;
}

}  // namespace cwave
