#include "cwave/toda.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "cwave/constants.hpp"

namespace cwave {

namespace {

double sq(double x) { return x * x; }

double dot(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const RVec& a) { return std::sqrt(dot(a, a)); }

void require_k(int k) {
    if (k < 2) throw std::invalid_argument("Toda system needs k >= 2, got " + std::to_string(k));
}

// distance of each b_j from pi on the circle
RVec wrap_to_pi(const RVec& b) {
    RVec w(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) w[j] = std::remainder(b[j] - M_PI, 2 * M_PI);
    return w;
}

}  // namespace

// ---- Dirichlet Laplacian ----

RVec DirichletOps::apply(const RVec& v) const {
    const int n = m();
    RVec out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += Delta[(std::size_t)i * n + j] * v[j];
    return out;
}

RVec DirichletOps::P_sigma(const RVec& v) const {
    const double t = dot(sigma, v) / dot(sigma, sigma);
    RVec out = v;
    for (int j = 0; j < m(); ++j) out[j] -= t * sigma[j];
    return out;
}

RVec DirichletOps::P_1(const RVec& v) const {
    const double t = c0 * dot(sigma, v);
    RVec out = v;
    for (double& x : out) x -= t;
    return out;
}

double DirichletOps::F0() const {
    double s = 0.0;
    for (double z : z_cr) s += std::exp(-z);
    return s;
}

DirichletOps dirichlet_ops(int k) {
    require_k(k);
    DirichletOps D;
    D.k = k;
    const int n = k - 1;
    D.Delta.assign((std::size_t)n * n, 0.0);
    for (int j = 0; j < n; ++j) {
        D.Delta[(std::size_t)j * n + j] = 2.0;
        if (j + 1 < n) D.Delta[(std::size_t)j * n + j + 1] = D.Delta[(std::size_t)(j + 1) * n + j] = -1.0;
    }
    D.sigma.resize(n);
    for (int j = 1; j <= n; ++j) D.sigma[j - 1] = 0.5 * j * (k - j);
    double ssum = 0.0, slog = 0.0;
    for (double s : D.sigma) {
        ssum += s;
        slog += s * std::log(s);
    }
    D.c0 = 1.0 / ssum;
    D.z_cr.resize(n);
    for (int j = 0; j < n; ++j) D.z_cr[j] = -std::log(D.sigma[j]) + D.c0 * slog;

    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = D.Delta[(std::size_t)i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    D.eig_min = es.eigenvalues()(0);
    return D;
}

GapCoords gap_coords(const RVec& zeta, const RVec& theta, double p, const DirichletOps& D) {
    const int k = (int)zeta.size();
    if (k != D.k || (int)theta.size() != k) throw std::invalid_argument("gap_coords: size mismatch");
    GapCoords g;
    g.a.resize(k - 1);
    g.b.resize(k - 1);
    for (int j = 0; j + 1 < k; ++j) {
        g.a[j] = 2.0 / (p - 1.0) * (zeta[j + 1] - zeta[j]);
        g.b[j] = theta[j + 1] - theta[j];
    }
    g.r = D.c0 * dot(D.sigma, g.a);
    g.z = g.a;
    for (double& z : g.z) z -= g.r;
    return g;
}

// ---- functionals ----

TodaParams toda_params(double p, Perturbation pert) {
    const ConstantsTable t = constants_table(p, build_grid(14.0, 2048));
    TodaParams par;
    par.p = p;
    par.A = t.A;
    par.B = t.B;
    par.pert = pert;
    return par;
}

double interaction_J(const RVec& zeta, double p) {
    double J = 0.0;
    for (std::size_t j = 0; j + 1 < zeta.size(); ++j) J += std::exp(-2.0 / (p - 1.0) * (zeta[j + 1] - zeta[j]));
    return J;
}

double lyapunov_E(const RVec& zeta, const RVec& theta, double p) {
    require_k((int)zeta.size());
    double E = 0.0;
    for (std::size_t j = 0; j + 1 < zeta.size(); ++j)
        E -= std::cos(theta[j + 1] - theta[j]) * std::exp(-2.0 / (p - 1.0) * (zeta[j + 1] - zeta[j]));
    return E;
}

void grad_E(const RVec& zeta, const RVec& theta, double p, RVec& dzeta, RVec& dtheta) {
    const int k = (int)zeta.size();
    require_k(k);
    const double q = 2.0 / (p - 1.0);
    dzeta.assign(k, 0.0);
    dtheta.assign(k, 0.0);
    for (int j = 0; j + 1 < k; ++j) {
        const double e = std::exp(-q * (zeta[j + 1] - zeta[j]));
        const double b = theta[j + 1] - theta[j];
        // term -cos(b) e of gap j touches zeta_j, zeta_{j+1}
        dzeta[j] -= q * std::cos(b) * e;
        dzeta[j + 1] += q * std::cos(b) * e;
        dtheta[j] -= std::sin(b) * e;
        dtheta[j + 1] += std::sin(b) * e;
    }
}

double lyapunov_F(const RVec& z, const RVec& b) {
    double F = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) F -= std::cos(b[j]) * std::exp(-z[j]);
    return F;
}

namespace {

// Smooth bounded stand-in for the O(J^{1+delta}) remainders.  Each
// component is a fixed random trigonometric sum in log s, normalised to
// |g| <= 1, times eps J^{1+delta'}.  A step-wise refreshed random vector
// would be discontinuous in s and defeat the embedded error control.
// Phase components enter through the differences b_j and carry a factor
// sin b_j: the exact PDE keeps real data real, so its remainders cannot
// push b off the alternating configuration b = pi.
struct PerturbationField {
    int k = 0;
    int modes = 0;
    RVec amp, freq, phase;  // (2k) x modes

    bool keep_real = true;

    PerturbationField(const Perturbation& pp, int k_) : k(k_), modes(std::max(1, pp.modes)), keep_real(pp.keep_real) {
        std::mt19937_64 rng(pp.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0), W(1.0, 4.0), P(0.0, 2 * M_PI);
        const std::size_t n = (std::size_t)2 * k * modes;
        amp.resize(n);
        freq.resize(n);
        phase.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            amp[i] = U(rng);
            freq[i] = W(rng);
            phase[i] = P(rng);
        }
        for (int c = 0; c < 2 * k; ++c) {
            double s = 0.0;
            for (int m = 0; m < modes; ++m) s += std::fabs(amp[(std::size_t)c * modes + m]);
            for (int m = 0; m < modes; ++m) amp[(std::size_t)c * modes + m] /= s;
        }
    }

    double g(int c, double ls) const {
        double v = 0.0;
        for (int m = 0; m < modes; ++m) {
            const std::size_t i = (std::size_t)c * modes + m;
            v += amp[i] * std::sin(freq[i] * ls + phase[i]);
        }
        return v;
    }

    void add(double s, double size, const RVec& theta, RVec& dz, RVec& dth) const {
        const double ls = std::log(s);
        for (int j = 0; j < k; ++j) dz[j] += size * g(j, ls);
        // common phase drift plus gap-wise increments; |each| <= size
        double acc = g(k, ls);
        RVec inc(k);
        inc[0] = acc;
        for (int j = 0; j + 1 < k; ++j) {
            acc += (keep_real ? std::sin(theta[j + 1] - theta[j]) : 1.0) * g(k + 1 + j, ls);
            inc[j + 1] = acc;
        }
        for (int j = 0; j < k; ++j) dth[j] += size * inc[j] / k;
    }
};

}  // namespace

namespace {

void rhs_impl(const TodaParams& par, const PerturbationField* field, double s, const RVec& zeta, const RVec& theta,
              RVec& dzeta, RVec& dtheta) {
    const int k = (int)zeta.size();
    const double q = 2.0 / (par.p - 1.0);
    dzeta.assign(k, 0.0);
    dtheta.assign(k, 0.0);
    for (int j = 0; j + 1 < k; ++j) {
        const double e = std::exp(-q * (zeta[j + 1] - zeta[j]));
        const double b = theta[j + 1] - theta[j];
        const double ce = std::cos(b) * e, se = std::sin(b) * e;
        dzeta[j] += par.A * ce;
        dzeta[j + 1] -= par.A * ce;
        dtheta[j] += par.B * se;
        dtheta[j + 1] -= par.B * se;
    }
    if (field) {
        const double size = par.pert.eps * std::pow(interaction_J(zeta, par.p), 1.0 + par.pert.delta_prime);
        field->add(s, size, theta, dzeta, dtheta);
    }
}

}  // namespace

void toda_rhs(const TodaParams& par, double s, const RVec& zeta, const RVec& theta, RVec& dzeta,
              RVec& dtheta) {
    const int k = (int)zeta.size();
    require_k(k);
    if ((int)theta.size() != k) throw std::invalid_argument("toda_rhs: zeta and theta sizes differ");
    if (par.pert.active()) {
        const PerturbationField f(par.pert, k);
        rhs_impl(par, &f, s, zeta, theta, dzeta, dtheta);
    } else {
        rhs_impl(par, nullptr, s, zeta, theta, dzeta, dtheta);
    }
}

// ---- integration ----

namespace {

using State = std::vector<double>;
namespace ode = boost::numeric::odeint;

std::vector<double> log_samples(double s0, double s1, int per_decade) {
    std::vector<double> out{s0};
    const int n = std::max(1, (int)std::ceil(std::log10(s1 / s0) * per_decade));
    for (int i = 1; i < n; ++i) out.push_back(s0 * std::pow(s1 / s0, (double)i / n));
    out.push_back(s1);
    return out;
}

void check_order(const RVec& zeta, double s) {
    for (std::size_t j = 0; j + 1 < zeta.size(); ++j)
        if (!(zeta[j + 1] > zeta[j])) {
            std::ostringstream os;
            os << "gap collapse at s = " << s << ": zeta_" << j + 1 << " = " << zeta[j] << " >= zeta_" << j + 2 << " = "
               << zeta[j + 1];
            throw GapCollapse(os.str());
        }
}

}  // namespace

Trajectory integrate_toda(const TodaParams& par, const TodaState& init, const IntegrateOptions& opt) {
    const int k = init.k();
    require_k(k);
    if ((int)init.theta.size() != k) throw std::invalid_argument("integrate_toda: zeta and theta sizes differ");
    if (!(init.s >= 1.0)) throw std::invalid_argument("integrate_toda: need s0 >= 1");
    if (!(opt.tol >= 1e-12 && opt.tol <= 1e-6)) throw std::invalid_argument("integrate_toda: tol must lie in [1e-12, 1e-6]");
    if (!(opt.s_end > init.s)) throw std::invalid_argument("integrate_toda: s_end must exceed s0");
    if (!(par.A > 0.0) || !(par.B > 0.0)) throw std::invalid_argument("integrate_toda: A and B must be positive");

    Trajectory tr;
    tr.k = k;
    tr.p = par.p;
    std::unique_ptr<PerturbationField> field;
    if (par.pert.active()) field = std::make_unique<PerturbationField>(par.pert, k);
    RVec dz, dth, gz, gth;
    auto sys = [&](const State& x, State& dx, double s) {
        RVec z(x.begin(), x.begin() + k), th(x.begin() + k, x.end());
        rhs_impl(par, field.get(), s, z, th, dz, dth);
        dx.resize(2 * k);
        std::copy(dz.begin(), dz.end(), dx.begin());
        std::copy(dth.begin(), dth.end(), dx.begin() + k);
    };
    auto gradient_residual = [&](const State& x, double s) {
        RVec z(x.begin(), x.begin() + k), th(x.begin() + k, x.end());
        rhs_impl(par, nullptr, s, z, th, dz, dth);
        grad_E(z, th, par.p, gz, gth);
        double r = 0.0;
        for (int j = 0; j < k; ++j) {
            r = std::max(r, std::fabs(dz[j] + 0.5 * (par.p - 1.0) * par.A * gz[j]));
            r = std::max(r, std::fabs(dth[j] + par.B * gth[j]));
        }
        return r / interaction_J(z, par.p);
    };
    auto E_of = [&](const State& x) {
        return lyapunov_E(RVec(x.begin(), x.begin() + k), RVec(x.begin() + k, x.end()), par.p);
    };

    State x(2 * k);
    std::copy(init.zeta.begin(), init.zeta.end(), x.begin());
    std::copy(init.theta.begin(), init.theta.end(), x.begin() + k);

    auto stepper = ode::make_dense_output(opt.tol, opt.tol, ode::runge_kutta_dopri5<State>());
    const double dt0 = 1e-3 * init.s;
    stepper.initialize(x, init.s, dt0);
    const std::vector<double> ts = log_samples(init.s, opt.s_end, opt.samples_per_decade);
    std::size_t next = 0;
    auto record = [&](double s, const State& xs) {
        tr.samples.push_back({s, RVec(xs.begin(), xs.begin() + k), RVec(xs.begin() + k, xs.end())});
    };
    record(ts[next++], x);
    double E_prev = E_of(x);

    State xs(2 * k);
    while (next < ts.size()) {
        if (tr.accepted >= opt.max_steps)
            throw TodaError("integrate_toda: step budget of " + std::to_string(opt.max_steps) + " exhausted at s = " +
                            std::to_string(stepper.current_time()));
        std::pair<double, double> iv;
        try {
            iv = stepper.do_step(sys);
        } catch (const ode::step_adjustment_error& e) {
            throw StepUnderflow(std::string("integrate_toda: ") + e.what());
        }
        ++tr.accepted;
        State cur = stepper.current_state();
        const double s_now = iv.second;
        if (!std::all_of(cur.begin(), cur.end(), [](double v) { return std::isfinite(v); }))
            throw TodaError("integrate_toda: non-finite state at s = " + std::to_string(s_now));
        check_order(RVec(cur.begin(), cur.begin() + k), s_now);
        if (stepper.current_time_step() < 1e-13 * s_now)
            throw StepUnderflow("integrate_toda: step size underflow at s = " + std::to_string(s_now));

        while (next < ts.size() && ts[next] <= s_now) {
            stepper.calc_state(ts[next], xs);
            record(ts[next], xs);
            ++next;
        }
        if (opt.zero_centre) {
            double m = 0.0;
            for (int j = 0; j < k; ++j) m += cur[j];
            m /= k;
            for (int j = 0; j < k; ++j) cur[j] -= m;
            stepper.initialize(cur, s_now, stepper.current_time_step());
        }
        const double E_now = E_of(cur);
        if (E_now > E_prev) {
            ++tr.E_increases;
            tr.max_E_increase = std::max(tr.max_E_increase, E_now - E_prev);
        }
        E_prev = E_now;
        if (!par.pert.active()) tr.max_gradient_residual = std::max(tr.max_gradient_residual, gradient_residual(cur, s_now));
    }
    return tr;
}

RVec toda_selfsimilar_alpha(int k, double p, double A) {
    const DirichletOps D = dirichlet_ops(k);
    RVec alpha(k, 0.0);
    // zeta_{j+1} - zeta_j = (p-1)/2 (log s + log(2A/((p-1) sigma_j)))
    for (int j = 0; j + 1 < k; ++j) alpha[j + 1] = alpha[j] + 0.5 * (p - 1.0) * std::log(2.0 * A / ((p - 1.0) * D.sigma[j]));
    double m = 0.0;
    for (double a : alpha) m += a;
    m /= k;
    for (double& a : alpha) a -= m;
    return alpha;
}

RealTodaReference real_toda_reference(int k, double p, double s_end, const RVec& zeta0) {
    require_k(k);
    TodaParams par = toda_params(p);
    TodaState st;
    st.s = 1.0;
    if (zeta0.empty()) {
        for (int j = 0; j < k; ++j) st.zeta.push_back(2.0 * (j - 0.5 * (k - 1)));
    } else {
        if ((int)zeta0.size() != k) throw std::invalid_argument("real_toda_reference: zeta0 has the wrong size");
        st.zeta = zeta0;
        double m = 0.0;
        for (double z : st.zeta) m += z;
        for (double& z : st.zeta) z -= m / k;
    }
    // the real system is the complex one on the invariant set b = pi; phases
    // 0, pi, 0, pi ... make cos b = -1 exactly and the phase equation inert
    for (int j = 0; j < k; ++j) st.theta.push_back(j % 2 ? M_PI : 0.0);
    IntegrateOptions opt;
    opt.s_end = s_end;
    opt.tol = 1e-11;
    opt.zero_centre = true;
    RealTodaReference ref;
    ref.traj = integrate_toda(par, st, opt);
    for (const TodaSample& smp : ref.traj.samples) {
        double m = 0.0;
        for (double z : smp.zeta) m += z;
        ref.max_centre = std::max(ref.max_centre, std::fabs(m));
    }
    const TodaSample& last = ref.traj.samples.back();
    ref.alpha.resize(k);
    for (int j = 0; j < k; ++j) ref.alpha[j] = last.zeta[j] - 0.5 * (p - 1.0) * (j + 1 - 0.5 * (k + 1)) * std::log(last.s);
    ref.alpha_closed = toda_selfsimilar_alpha(k, p, par.A);
    return ref;
}

// ---- CSV ----

std::vector<std::string> trajectory_header(int k) {
    std::vector<std::string> h{"s"};
    for (int j = 1; j <= k; ++j) h.push_back("zeta_" + std::to_string(j));
    for (int j = 1; j <= k; ++j) h.push_back("theta_" + std::to_string(j));
    for (int j = 1; j < k; ++j) h.push_back("a_" + std::to_string(j));
    for (int j = 1; j < k; ++j) h.push_back("b_" + std::to_string(j));
    for (const char* c : {"r", "z_dist", "b_dist", "E", "J"}) h.push_back(c);
    return h;
}

std::vector<std::vector<double>> trajectory_rows(const Trajectory& t) {
    const DirichletOps D = dirichlet_ops(t.k);
    std::vector<std::vector<double>> rows;
    rows.reserve(t.samples.size());
    for (const TodaSample& s : t.samples) {
        const GapCoords g = gap_coords(s.zeta, s.theta, t.p, D);
        std::vector<double> row{s.s};
        row.insert(row.end(), s.zeta.begin(), s.zeta.end());
        row.insert(row.end(), s.theta.begin(), s.theta.end());
        row.insert(row.end(), g.a.begin(), g.a.end());
        row.insert(row.end(), g.b.begin(), g.b.end());
        RVec dz = g.z;
        for (int j = 0; j < D.m(); ++j) dz[j] -= D.z_cr[j];
        row.push_back(g.r);
        row.push_back(norm2(dz));
        row.push_back(norm2(wrap_to_pi(g.b)));
        row.push_back(lyapunov_E(s.zeta, s.theta, t.p));
        row.push_back(interaction_J(s.zeta, t.p));
        rows.push_back(std::move(row));
    }
    return rows;
}

Trajectory trajectory_from_csv(const std::string& path, double p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory file " + path);
    std::string line;
    // CSV rows end in CRLF
    auto chomp = [](std::string& l) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
    };
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    chomp(line);
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) head.push_back(c);
    }
    int k = 0;
    for (const std::string& h : head)
        if (h.rfind("zeta_", 0) == 0) ++k;
    if (k < 2 || head != trajectory_header(k)) throw std::runtime_error(path + ": not a Toda trajectory header");
    Trajectory t;
    t.k = k;
    t.p = p;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c;
        std::vector<double> v;
        while (std::getline(ss, c, ',')) {
            double x = 0.0;
            const auto r = std::from_chars(c.data(), c.data() + c.size(), x);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size())
                throw std::runtime_error(path + ": not a number: '" + c + "'");
            v.push_back(x);
        }
        if (v.size() != head.size()) throw std::runtime_error(path + ": ragged row");
        t.samples.push_back({v[0], RVec(v.begin() + 1, v.begin() + 1 + k), RVec(v.begin() + 1 + k, v.begin() + 1 + 2 * k)});
    }
    return t;
}

// ---- lemma checks ----

bool MatrixLemmaReport::pass() const {
    return sigma_identity_exact && std::fabs(c0 - c0_formula) <= 1e-15 && std::fabs(eig_min - eig_min_brute) <= 1e-10 &&
           violations == 0 && tilde_positive && std::fabs(tilde_top - 2.0) <= 1e-12 && tilde_sigma_residual <= 1e-12 &&
           std::fabs(sigma_zcr) <= 1e-12 && saddle_error <= 1e-10;
}

namespace {

// orthonormal basis of sigma-perp as columns
Eigen::MatrixXd pi_basis(const DirichletOps& D) {
    const int n = D.m();
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(D.sigma.data(), n).normalized();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - s * s.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    // eigenvalue 0 for sigma, 1 on the complement
    return es.eigenvectors().rightCols(n - 1);
}

}  // namespace

MatrixLemmaReport check_matrix_lemma(int k, long samples, std::uint64_t seed) {
    const DirichletOps D = dirichlet_ops(k);
    const int n = D.m();
    MatrixLemmaReport rep;
    rep.k = k;
    rep.samples = samples;

    // Delta (2 sigma) = 2 in integers: 2 sigma_j = j (k - j)
    rep.sigma_identity_exact = true;
    for (long j = 1; j <= n; ++j) {
        auto s2 = [&](long i) -> long { return (i <= 0 || i >= k) ? 0 : i * (k - i); };
        if (2 * s2(j) - s2(j - 1) - s2(j + 1) != 2) rep.sigma_identity_exact = false;
    }
    rep.c0 = D.c0;
    rep.c0_formula = 12.0 / ((double)(k - 1) * k * (k + 1));
    rep.eig_min_brute = D.eig_min;
    rep.eig_min = 2.0 - 2.0 * std::cos(M_PI / k);
    rep.c2 = D.eig_min;
    rep.sigma_zcr = dot(D.sigma, D.z_cr);

    Eigen::MatrixXd Dl(n, n), M(n, n), T(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Dl(i, j) = D.Delta[(std::size_t)i * n + j];
            M(i, j) = Dl(i, j) - D.c0;
            T(i, j) = 2.0 * (i == j) + D.c0 - Dl(i, j);
        }
    // c1: smallest eigenvalue of the form restricted to sigma-perp
    // (M sigma = 1 - c0 <1, sigma> 1 = 0, so the cross terms vanish)
    if (n == 1) {
        rep.c1 = 1.0;  // P_sigma is zero, any c1 works; report 1
    } else {
        const Eigen::MatrixXd Q = pi_basis(D);
        const Eigen::MatrixXd R = Q.transpose() * M * Q;
        rep.c1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R, Eigen::EigenvaluesOnly).eigenvalues()(0);
    }
    rep.tilde_positive = (T.array() > 0.0).all();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(T, Eigen::EigenvaluesOnly);
    rep.tilde_top = te.eigenvalues()(n - 1);
    const Eigen::VectorXd sg = Eigen::Map<const Eigen::VectorXd>(D.sigma.data(), n);
    rep.tilde_sigma_residual = (T * sg - 2.0 * sg).cwiseAbs().maxCoeff();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (long t = 0; t < samples; ++t) {
        RVec v(n);
        for (double& x : v) x = N(rng);
        if (t % 4 == 1) {
            // close to the equality direction sigma
            const double e = std::pow(10.0, -6.0 * (0.5 + 0.5 * U(rng)));
            for (int j = 0; j < n; ++j) v[j] = D.sigma[j] + e * v[j];
        }
        const RVec Dv = D.apply(v);
        double one_v = 0.0;
        for (double x : v) one_v += x;
        const double vv = dot(v, v);
        const double q1 = dot(v, Dv) - D.c0 * one_v * one_v;
        const double ps = sq(norm2(D.P_sigma(v)));
        const double slack = 1e-12 * vv * (1.0 + 2.0 * n);
        if (q1 < rep.c1 * ps - slack || dot(v, Dv) < rep.c2 * vv - slack) {
            if (rep.violations == 0) rep.witness = v;
            ++rep.violations;
        }
    }

    // z -> <1, e^{-z}> on Pi by Newton in an orthonormal basis
    if (n == 1) {
        rep.saddle_error = std::fabs(D.z_cr[0]);  // Pi = {0}
    } else {
        const Eigen::MatrixXd Q = pi_basis(D);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n - 1);
        for (int it = 0; it < 60; ++it) {
            const Eigen::VectorXd z = Q * w;
            const Eigen::VectorXd e = (-z.array()).exp();
            const Eigen::VectorXd g = -Q.transpose() * e;
            const Eigen::MatrixXd H = Q.transpose() * e.asDiagonal() * Q;
            const Eigen::VectorXd dw = H.ldlt().solve(-g);
            w += dw;
            if (dw.norm() < 1e-15) break;
        }
        const Eigen::VectorXd z = Q * w;
        double err = 0.0;
        for (int j = 0; j < n; ++j) err += sq(z(j) - D.z_cr[j]);
        rep.saddle_error = std::sqrt(err);
    }
    return rep;
}

SaddleLemmaReport check_saddle_lemma(int k, long samples, std::uint64_t seed) {
    const DirichletOps D = dirichlet_ops(k);
    const int n = D.m();
    SaddleLemmaReport rep;
    rep.k = k;
    rep.samples = samples;
    rep.min_ratio = 1e300;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Eigen::MatrixXd Q = n > 1 ? pi_basis(D) : Eigen::MatrixXd(n, 0);
    for (long t = 0; t < samples; ++t) {
        // direction in Pi x R^{k-1}, radius up to 0.1 in the l1-type sum
        Eigen::VectorXd wz(Q.cols());
        for (int i = 0; i < wz.size(); ++i) wz(i) = N(rng);
        Eigen::VectorXd dz = Q * wz;
        RVec db(n);
        for (double& x : db) x = N(rng);
        const double rad = 0.1 * std::pow(U(rng), 2.0) + 1e-8;
        const double scale = dz.norm() + norm2(db);
        RVec z(n), b(n);
        for (int j = 0; j < n; ++j) {
            z[j] = D.z_cr[j] + (n > 1 ? rad * dz(j) / scale : 0.0);
            b[j] = M_PI + rad * db[j] / scale;
        }
        RVec cz(n), sz(n);
        for (int j = 0; j < n; ++j) {
            cz[j] = std::cos(b[j]) * std::exp(-z[j]);
            sz[j] = std::sin(b[j]) * std::exp(-z[j]);
        }
        double dzn = 0.0, dbn = 0.0;
        for (int j = 0; j < n; ++j) {
            dzn += sq(z[j] - D.z_cr[j]);
            dbn += sq(b[j] - M_PI);
        }
        const double lhs = norm2(D.P_sigma(cz)) + norm2(sz);
        const double rhs = std::sqrt(dzn) + std::sqrt(dbn);
        rep.min_ratio = std::min(rep.min_ratio, lhs / rhs);
    }
    rep.C = 1.0 / rep.min_ratio;
    return rep;
}

}  // namespace cwave
