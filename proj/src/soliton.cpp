#include "cwave/soliton.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cwave/banded.hpp"

namespace cwave {

Physics::Physics(double p_) : p(p_) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be finite and > 1");
    c = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    kappa0 = std::pow(c, 1.0 / (p - 1.0));
    beta = 4.0 / (p - 1.0);
    gamma = (p + 3.0) / (p - 1.0);
}

namespace {

void check_d(double d) {
    if (!(std::fabs(d) < 1.0)) throw std::domain_error("soliton parameter d must satisfy |d| < 1");
}

// log(1 + d y) at y = tanh(xi), d = -tanh(zeta)
inline double log_one_plus_dy(double xi, double zeta) {
    return log_sech(xi) + log_sech(zeta) - log_sech(xi - zeta);
}

}  // namespace

double kappa(double d, double y, double p) {
    check_d(d);
    const Physics ph(p);
    const double a = 1.0 / (p - 1.0);
    const double den = 1.0 + d * y;
    if (!(den > 0.0)) throw std::domain_error("kappa: 1 + d y must be positive");
    return ph.kappa0 * std::pow(1.0 - d * d, a) * std::pow(den, -2.0 * a);
}

double kappa_ddiff(double d, double y, double p) {
    const double a = 1.0 / (p - 1.0);
    return kappa(d, y, p) * (-2.0 * a) * (d / (1.0 - d * d) + y / (1.0 + d * y));
}

std::pair<double, double> kappa_star(double d, double nu, double y, double p) {
    check_d(d);
    const Physics ph(p);
    const double a = 1.0 / (p - 1.0);
    const double den = 1.0 + d * y + nu;
    if (!(den > 0.0)) throw std::domain_error("kappa_star: 1 + d y + nu must be positive");
    const double k1 = ph.kappa0 * std::pow(1.0 - d * d, a) * std::pow(den, -2.0 * a);
    const double k2 = -2.0 * a * nu * k1 / den;
    return {k1, k2};
}

RVec kappa_on(const Space& sp, double zeta) {
    const Physics ph(sp.p);
    const double a = 1.0 / (sp.p - 1.0);
    RVec out(sp.n());
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double xi = sp.grid.xi[m];
        out[m] = ph.kappa0 * std::exp(2.0 * a * (log_sech(xi - zeta) - log_sech(xi)));
    }
    return out;
}

FieldPair kappa_star_on(const Space& sp, double d, double nu) {
    check_d(d);
    const double zeta = -std::atanh(d);
    const Physics ph(sp.p);
    const double a = 1.0 / (sp.p - 1.0);
    FieldPair out = FieldPair::zeros(sp.n());
    for (std::size_t m = 0; m < sp.n(); ++m) {
        const double den = std::exp(log_one_plus_dy(sp.grid.xi[m], zeta)) + nu;
        if (!(den > 0.0))
            throw std::domain_error("kappa_star: denominator non-positive at xi = " + std::to_string(sp.grid.xi[m]));
        const double k1 = ph.kappa0 * std::exp(2.0 * a * log_sech(zeta)) * std::pow(den, -2.0 * a);
        out.f1[m] = k1;
        out.f2[m] = -2.0 * a * nu * k1 / den;
    }
    return out;
}

double SolitonConfig::d(int i) const { return -std::tanh(zeta.at(i)); }

void SolitonConfig::validate() const {
    if (zeta.empty()) throw std::invalid_argument("SolitonConfig: need at least one soliton");
    if (zeta.size() != theta.size()) throw std::invalid_argument("SolitonConfig: zeta and theta sizes differ");
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        if (!std::isfinite(zeta[i]) || !std::isfinite(theta[i]))
            throw std::invalid_argument("SolitonConfig: non-finite parameter");
        if (i > 0 && !(zeta[i] > zeta[i - 1]))
            throw std::invalid_argument("SolitonConfig: centres must be strictly increasing");
    }
}

double SolitonConfig::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < zeta.size(); ++i) g = std::min(g, zeta[i] - zeta[i - 1]);
    return g;
}

// ---- spectral objects ----

double inv_c_check(int lambda, const Space& sp) {
    double I = 0.0;
    if (lambda == 1) {
        I = integrate(RVec(sp.n(), 1.0), MeasureKind::rho, sp);
    } else {
        RVec f(sp.n());
        for (std::size_t m = 0; m < f.size(); ++m) f[m] = sp.grid.y[m] * sp.grid.y[m];
        I = integrate(f, MeasureKind::rho_over_one_minus_y2, sp);
    }
    return 2.0 * (2.0 / (sp.p - 1.0) + lambda) * I;
}

double inv_c_tilde(const Space& sp) {
    const Physics ph(sp.p);
    const RVec one(sp.n(), 1.0);
    return 4.0 * ph.kappa0 * ph.kappa0 / (sp.p - 1.0) * integrate(one, MeasureKind::rho_over_one_minus_y2, sp);
}

RVec solve_dual_first(const Space& sp, double lambda, const RVec& r2, const RVec& r2_xi) {
    const Physics ph(sp.p);
    const int n = sp.grid.n;
    const DiffOp& D1 = sp.d1;
    const DiffOp& D2 = sp.d2;
    int kl = 0, ku = 0;
    for (const DiffOp* D : {&D1, &D2})
        for (int i = 0; i < n; ++i) {
            kl = std::max(kl, i - D->start[i]);
            ku = std::max(ku, D->start[i] + D->width - 1 - i);
        }
    BandMatrix A(n, kl, ku);
    RVec rhs(n);
    for (int i = 0; i < n; ++i) {
        const double t = sp.grid.y[i], s2 = sp.grid.sech2[i];
        // -r'' + beta tanh r' + sech^2 r = sech^2 * RHS; the r'' term is
        // dropped in the two end rows, which selects the bounded branch
        const bool edge = (i == 0 || i == n - 1);
        for (int k = 0; k < D1.width; ++k) A.add(i, D1.start[i] + k, ph.beta * t * D1.w[(std::size_t)i * D1.width + k]);
        if (!edge)
            for (int k = 0; k < D2.width; ++k) A.add(i, D2.start[i] + k, -D2.w[(std::size_t)i * D2.width + k]);
        A.add(i, i, s2);
        rhs[i] = s2 * (lambda - ph.gamma) * r2[i] - 2.0 * t * r2_xi[i] + 8.0 / (sp.p - 1.0) * r2[i];
    }
    try {
        A.solve(rhs);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " (dual solve, n=" + std::to_string(n) +
                                 ", half-width=" + std::to_string(sp.grid.half_width) + ")");
    }
    return rhs;
}

SpectralBundle spectral_bundle(const Space& sp, double d) {
    check_d(d);
    const Physics ph(sp.p);
    const double p = sp.p, a = 1.0 / (p - 1.0), m = (p + 1.0) / (p - 1.0);
    const double zeta = -std::atanh(d);
    const std::size_t n = sp.n();
    SpectralBundle b;
    b.d = d;
    b.zeta = zeta;
    b.c1 = 1.0 / inv_c_check(1, sp);
    b.c0 = 1.0 / inv_c_check(0, sp);
    b.ct0 = 1.0 / inv_c_tilde(sp);
    b.F1 = b.F0 = b.W1 = b.W0 = b.Ft0 = b.Wt0 = FieldPair::zeros(n);
    b.psi_check.resize(n);
    b.psi_tilde.resize(n);

    const double lsz = log_sech(zeta);
    RVec w12(n), w12x(n), w02(n), w02x(n), wt2(n), wt2x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = sp.grid.xi[i], t = sp.grid.y[i], s2 = sp.grid.sech2[i];
        const double L1 = log_one_plus_dy(xi, zeta);
        const double dL1 = std::tanh(xi - zeta) - t;        // d/dxi log(1 + d y)
        const double h = std::exp(2.0 * a * lsz - m * L1);  // (1-d^2)^a (1+dy)^{-m}
        const double ypd = std::sinh(xi - zeta) * std::exp(log_sech(xi) + lsz);  // y + d
        const double kap = ph.kappa0 * std::exp(2.0 * a * (log_sech(xi - zeta) - log_sech(xi)));

        const double f1 = std::exp(2.0 * p * a * lsz - m * L1);
        b.F1.f1[i] = f1;
        b.F1.f2[i] = f1;
        b.F0.f1[i] = ypd * h;
        b.Ft0.f1[i] = kap;

        w12[i] = b.c1 * s2 * h;
        w12x[i] = w12[i] * (-2.0 * t - m * dL1);
        w02[i] = b.c0 * ypd * h;
        w02x[i] = b.c0 * (s2 * h - m * dL1 * ypd * h);
        wt2[i] = b.ct0 * kap;
        wt2x[i] = wt2[i] * (-2.0 * a * dL1);

        const double kp = std::pow(kap, p - 1.0);
        b.psi_check[i] = p * kp - ph.c;
        b.psi_tilde[i] = kp - ph.c;
    }
    const RVec w11 = solve_dual_first(sp, 1.0, w12, w12x);
    const RVec w01 = solve_dual_first(sp, 0.0, w02, w02x);
    const RVec wt1 = solve_dual_first(sp, 0.0, wt2, wt2x);
    for (std::size_t i = 0; i < n; ++i) {
        b.W1.f1[i] = w11[i];
        b.W1.f2[i] = w12[i];
        b.W0.f1[i] = w01[i];
        b.W0.f2[i] = w02[i];
        b.Wt0.f1[i] = wt1[i];
        b.Wt0.f2[i] = wt2[i];
    }
    return b;
}

CVec apply_L(const Space& sp, const CVec& r) {
    const Exec ex = default_exec();
    const CVec r1 = sp.d1.apply(r, ex), r2 = sp.d2.apply(r, ex);
    CVec out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        out[i] = (r2[i] - sp.beta * sp.grid.y[i] * r1[i]) / sp.grid.sech2[i];
    return out;
}

namespace {

FieldPair apply_lin(const Space& sp, const RVec& psi, const FieldPair& r) {
    const Physics ph(sp.p);
    const CVec Lr = apply_L(sp, r.f1);
    const CVec dr2 = sp.d1.apply(r.f2, default_exec());
    FieldPair out = FieldPair::zeros(sp.n());
    for (std::size_t i = 0; i < sp.n(); ++i) {
        out.f1[i] = r.f2[i];
        // -2 y d_y = -2 tanh(xi) cosh^2(xi) d_xi
        out.f2[i] = Lr[i] + psi[i] * r.f1[i] - ph.gamma * r.f2[i] - 2.0 * sp.grid.y[i] / sp.grid.sech2[i] * dr2[i];
    }
    return out;
}

}  // namespace

FieldPair apply_L_check(const Space& sp, const SpectralBundle& b, const FieldPair& r) {
    return apply_lin(sp, b.psi_check, r);
}
FieldPair apply_L_tilde(const Space& sp, const SpectralBundle& b, const FieldPair& r) {
    return apply_lin(sp, b.psi_tilde, r);
}

double proj_check(int lambda, const SpectralBundle& b, const FieldPair& r, const Space& sp) {
    if (lambda != 0 && lambda != 1) throw std::invalid_argument("proj_check: lambda must be 0 or 1");
    return inner_phi(b.W(lambda), r, sp);
}
double proj_check(int lambda, double d, const FieldPair& r, const Space& sp) {
    return proj_check(lambda, spectral_bundle(sp, d), r, sp);
}
double proj_tilde(const SpectralBundle& b, const FieldPair& r, const Space& sp) { return inner_phi(b.Wt0, r, sp); }
double proj_tilde(double d, const FieldPair& r, const Space& sp) { return proj_tilde(spectral_bundle(sp, d), r, sp); }

CVec multisoliton_K(const SolitonConfig& cfg, const Space& sp) {
    cfg.validate();
    CVec K(sp.n(), 0.0);
    for (int j = 0; j < cfg.k(); ++j) {
        const RVec kap = kappa_on(sp, cfg.zeta[j]);
        const cplx ph = std::polar(1.0, cfg.theta[j]);
        for (std::size_t i = 0; i < K.size(); ++i) K[i] += ph * kap[i];
    }
    return K;
}

namespace {

double bilinear_psi(const RVec& psi, const FieldPair& q, const FieldPair& r, const Space& sp) {
    const std::size_t n = sp.n();
    const Exec ex = default_exec();
    const CVec dq = sp.d1.apply(q.f1, ex), dr = sp.d1.apply(r.f1, ex);
    RVec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = -psi[i] * q.f1[i].real() * r.f1[i].real() + q.f2[i].real() * r.f2[i].real();
        b[i] = dq[i].real() * dr[i].real();
    }
    return kern::dot(a.data(), sp.w_rho.data(), n, ex) + kern::dot(b.data(), sp.w_rho1.data(), n, ex);
}

}  // namespace

double bilinear_check(const SpectralBundle& b, const FieldPair& q, const FieldPair& r, const Space& sp) {
    return bilinear_psi(b.psi_check, q, r, sp);
}
double bilinear_tilde(const SpectralBundle& b, const FieldPair& q, const FieldPair& r, const Space& sp) {
    return bilinear_psi(b.psi_tilde, q, r, sp);
}

double bilinear_PhiK(const CVec& K, const FieldPair& r, const FieldPair& rp, const Space& sp) {
    const Physics ph(sp.p);
    const double p = sp.p;
    const std::size_t n = sp.n();
    const Exec ex = default_exec();
    const CVec dr = sp.d1.apply(r.f1, ex), drp = sp.d1.apply(rp.f1, ex);
    RVec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double aK = std::abs(K[i]);
        double v = (r.f2[i] * std::conj(rp.f2[i])).real() + (ph.c - std::pow(aK, p - 1.0)) * (r.f1[i] * std::conj(rp.f1[i])).real();
        if (aK > 0.0) {
            const double x = (std::conj(K[i]) * r.f1[i]).real(), z = (std::conj(K[i]) * rp.f1[i]).real();
            v -= (p - 1.0) * std::pow(aK, p - 3.0) * x * z;
        }
        a[i] = v;
        b[i] = (dr[i] * std::conj(drp[i])).real();
    }
    return kern::dot(a.data(), sp.w_rho.data(), n, ex) + kern::dot(b.data(), sp.w_rho1.data(), n, ex);
}

double bilinear_PhiK(const SolitonConfig& cfg, const FieldPair& r, const FieldPair& rp, const Space& sp) {
    return bilinear_PhiK(multisoliton_K(cfg, sp), r, rp, sp);
}

// ---- modulation directions ----

ModeBasis mode_basis(const SolitonConfig& cfg, const Space& sp) {
    cfg.validate();
    ModeBasis mb;
    mb.cfg = cfg;
    const int k = cfg.k();
    for (int l = 0; l < k; ++l) mb.bundles.push_back(spectral_bundle(sp, cfg.d(l)));
    for (int l = 0; l < k; ++l) {
        const cplx e = std::polar(1.0, cfg.theta[l]);
        mb.directions.push_back(e * mb.bundles[l].F1);
        mb.directions.push_back(e * mb.bundles[l].F0);
        mb.directions.push_back((cplx(0, 1) * e) * mb.bundles[l].Ft0);
    }
    const int N = 3 * k;
    mb.gram.assign((std::size_t)N * N, 0.0);
    for (int c = 0; c < N; ++c) {
        const RVec col = mode_functionals(mb, mb.directions[c], sp);
        for (int r = 0; r < N; ++r) mb.gram[(std::size_t)r * N + c] = col[r];
    }
    return mb;
}

std::vector<double> mode_functionals(const ModeBasis& mb, const FieldPair& q, const Space& sp) {
    const int k = mb.cfg.k();
    std::vector<double> f(3 * k);
    for (int l = 0; l < k; ++l) {
        const FieldPair rot = std::polar(1.0, -mb.cfg.theta[l]) * q;
        const FieldPair re = real_part(rot), im = imag_part(rot);
        f[3 * l + 0] = proj_check(1, mb.bundles[l], re, sp);
        f[3 * l + 1] = proj_check(0, mb.bundles[l], re, sp);
        f[3 * l + 2] = proj_tilde(mb.bundles[l], im, sp);
    }
    return f;
}

FieldPair pi_minus(const FieldPair& q, const ModeBasis& mb, const Space& sp) {
    const int N = 3 * mb.cfg.k();
    const std::vector<double> f = mode_functionals(mb, q, sp);
    Eigen::MatrixXd G(N, N);
    Eigen::VectorXd rhs(N);
    for (int r = 0; r < N; ++r) {
        rhs(r) = f[r];
        for (int c = 0; c < N; ++c) G(r, c) = mb.gram[(std::size_t)r * N + c];
    }
    const Eigen::VectorXd coef = G.partialPivLu().solve(rhs);
    FieldPair out = q;
    for (int c = 0; c < N; ++c) out = out - cplx(coef(c)) * mb.directions[c];
    return out;
}

FieldPair pi_minus(const FieldPair& q, const SolitonConfig& cfg, const Space& sp) {
    return pi_minus(q, mode_basis(cfg, sp), sp);
}

double a_minus(const FieldPair& q, const ModeBasis& mb, const Space& sp) {
    const FieldPair qm = pi_minus(q, mb, sp);
    return bilinear_PhiK(mb.cfg, qm, qm, sp);
}

double a_minus(const FieldPair& q, const SolitonConfig& cfg, const Space& sp) {
    return a_minus(q, mode_basis(cfg, sp), sp);
}

// ---- interaction integrals ----

double h_weight(double gap, double p) {
    if (p < 2.0) return std::exp(-p / (p - 1.0) * gap);
    if (p == 2.0) return std::exp(-2.0 * gap) * std::sqrt(gap);
    return std::exp(-2.0 / (p - 1.0) * gap);
}

std::string h_branch(double p) {
    if (p < 2.0) return "p<2: exp(-p/(p-1) gap)";
    if (p == 2.0) return "p=2: exp(-2 gap) sqrt(gap)";
    return "p>2: exp(-2/(p-1) gap)";
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

double gk(const std::function<double(double)>& f, double lo, double hi) {
    double err = 0.0;
    return GK::integrate(f, lo, hi, 12, 1e-13, &err);
}

// every integrand here is a product of sech powers centred on the zetas and
// decays at least like exp(-2|xi - zeta|) outside them, so the line is cut
// 20 units past the outer centres (tail ~ e^-40) and split into pieces no
// longer than 2 so a fixed GK rule resolves each bump without deep recursion
constexpr double kTail = 20.0, kPiece = 2.0;

std::vector<double> refine(std::vector<double> br) {
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<double> out{br.front()};
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const int m = std::max(1, (int)std::ceil((br[i + 1] - br[i]) / kPiece));
        for (int q = 1; q <= m; ++q) out.push_back(q == m ? br[i + 1] : br[i] + (br[i + 1] - br[i]) * q / m);
    }
    return out;
}

double gk_pieces(const std::function<double(double)>& f, const std::vector<double>& br) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) s += gk(f, br[i], br[i + 1]);
    return s;
}

}  // namespace

InteractionReport interaction_integrals(const SolitonConfig& cfg, double p, bool tables) {
    cfg.validate();
    const Physics ph(p);
    const int k = cfg.k();
    const double a = 1.0 / (p - 1.0);
    InteractionReport rep;
    rep.k = k;
    for (int l = 0; l + 1 < k; ++l) {
        const double g = cfg.zeta[l + 1] - cfg.zeta[l];
        rep.J += std::exp(-2.0 * a * g);
        rep.Jbar += g * std::exp(-2.0 * a * g);
        rep.Jcheck += h_weight(g, p);
        rep.separators.push_back(std::tanh(0.5 * (cfg.zeta[l] + cfg.zeta[l + 1])));
    }

    auto S = [&](int j, double xi) { return std::exp(2.0 * a * log_sech(xi - cfg.zeta[j])); };
    auto K0 = [&](double xi) {
        cplx s = 0.0;
        for (int j = 0; j < k; ++j) s += std::polar(S(j, xi), cfg.theta[j]);
        return s;
    };

    // |K0|^{p-2} is singular at zeros of K0 when p < 2; split the line at
    // the minima of |K0| between neighbouring centres and let tanh-sinh
    // handle the endpoint behaviour.
    std::vector<double> cuts;
    for (int j = 0; j + 1 < k; ++j) {
        auto r = boost::math::tools::brent_find_minima([&](double x) { return std::abs(K0(x)); }, cfg.zeta[j],
                                                       cfg.zeta[j + 1], 50);
        cuts.push_back(r.first);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    const double lo_all = cfg.zeta.front() - kTail, hi_all = cfg.zeta.back() + kTail;
    // between cuts only the centres are added, so the singular points stay at
    // piece endpoints
    std::vector<double> edges{lo_all};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(hi_all);
    rep.J_l.assign(k, 0.0);
    for (int l = 0; l < k; ++l) {
        auto f = [&](double xi) {
            const double m = std::abs(K0(xi));
            if (m == 0.0) return 0.0;
            return S(l, xi) * std::pow(m, p - 2.0);
        };
        double s = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            if (p < 2.0) {
                // tanh-sinh copes with the |K0|^{p-2} endpoint singularity
                std::vector<double> br{edges[e], edges[e + 1]};
                for (double z : cfg.zeta)
                    if (z > edges[e] && z < edges[e + 1]) br.push_back(z);
                std::sort(br.begin(), br.end());
                for (std::size_t q = 0; q + 1 < br.size(); ++q) s += ts.integrate(f, br[q], br[q + 1], 1e-12);
            } else {
                std::vector<double> br{edges[e], edges[e + 1]};
                for (double z : cfg.zeta)
                    if (z > edges[e] && z < edges[e + 1]) br.push_back(z);
                s += gk_pieces(f, refine(br));
            }
        }
        rep.J_l[l] = std::pow(ph.kappa0, p - 1.0) * s;
    }

    if (!tables) return rep;
    const double kp1 = std::pow(ph.kappa0, p + 1.0);
    const double pbar = std::min(p, 2.0);
    const std::size_t N = (std::size_t)k * k * k;
    rep.A_check.assign(N, 0.0);
    rep.A_tilde.assign(N, 0.0);
    rep.B.assign(N, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (int l = 0; l < k; ++l) {
                const double lo = j == 0 ? lo_all : 0.5 * (cfg.zeta[j - 1] + cfg.zeta[j]);
                const double hi = j == k - 1 ? hi_all : 0.5 * (cfg.zeta[j] + cfg.zeta[j + 1]);
                std::vector<double> br{lo, hi}, full{lo_all, hi_all};
                for (double z : cfg.zeta) {
                    if (z > lo && z < hi) br.push_back(z);
                    full.push_back(z);
                }
                br = refine(br);
                full = refine(full);
                auto base = [&](double xi) { return S(i, xi) * std::pow(S(j, xi), p - 1.0) * S(l, xi); };
                const std::size_t idx = ((std::size_t)i * k + j) * k + l;
                rep.A_check[idx] =
                    kp1 * gk_pieces([&](double xi) { return std::tanh(xi - cfg.zeta[i]) * base(xi); }, br);
                rep.A_tilde[idx] = kp1 * gk_pieces(base, br);
                rep.B[idx] = kp1 * gk_pieces(
                                       [&](double xi) {
                                           return S(i, xi) * std::pow(S(j, xi), p - pbar) * std::pow(S(l, xi), pbar);
                                       },
                                       full);
            }
    return rep;
}

}  // namespace cwave
