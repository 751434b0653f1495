#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "cwave/constants.hpp"
#include "cwave/pde.hpp"
#include "cwave/toda.hpp"

namespace cwave {

namespace {

// e^{-i th_l} q split into the two real projections that fix (zeta_l, theta_l)
RVec orthogonality(const Space& sp, const FieldPair& q, const SolitonConfig& cfg,
                   const std::vector<SpectralBundle>& b) {
    const int k = cfg.k();
    RVec f(2 * k);
    for (int l = 0; l < k; ++l) {
        const FieldPair rot = std::polar(1.0, -cfg.theta[l]) * q;
        f[2 * l] = proj_check(0, b[l], real_part(rot), sp);
        f[2 * l + 1] = proj_tilde(b[l], imag_part(rot), sp);
    }
    return f;
}

double max_abs(const RVec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<SpectralBundle> bundles_for(const Space& sp, const SolitonConfig& cfg) {
    std::vector<SpectralBundle> b;
    for (int l = 0; l < cfg.k(); ++l) b.push_back(spectral_bundle(sp, cfg.d(l)));
    return b;
}

void check_gaps(const SolitonConfig& cfg, double min_gap, const char* what) {
    if (cfg.k() > 1 && cfg.min_gap() < min_gap)
        throw std::invalid_argument(std::string(what) + ": gap " + std::to_string(cfg.min_gap()) + " below " +
                                    std::to_string(min_gap));
}

}  // namespace

FieldPair modulation_residual_field(const Space& sp, const PdeState& st, const SolitonConfig& cfg) {
    FieldPair q;
    q.f1 = st.u;
    q.f2 = st.v;
    if (st.bg.k() > 0) {
        const CVec K0 = multisoliton_K(st.bg, sp);
        for (std::size_t i = 0; i < sp.n(); ++i) q.f1[i] += K0[i];
    }
    const CVec K = multisoliton_K(cfg, sp);
    for (std::size_t i = 0; i < sp.n(); ++i) q.f1[i] -= K[i];
    return q;
}

ModulationRecord modulation_fit(const Space& sp, const PdeState& st, const SolitonConfig& guess,
                                const ModulationOptions& opt) {
    guess.validate();
    check_gaps(guess, opt.min_gap, "modulation_fit");
    const int k = guess.k();
    SolitonConfig cfg = guess;
    {
        const double qn = norm_H(modulation_residual_field(sp, st, cfg), sp);
        if (qn > opt.max_q_norm)
            throw std::invalid_argument("modulation_fit: guess outside the basin, |q|_H = " + std::to_string(qn));
    }
    ModulationRecord rec;
    rec.s = st.s;
    std::vector<SpectralBundle> b = bundles_for(sp, cfg);
    RVec F = orthogonality(sp, modulation_residual_field(sp, st, cfg), cfg, b);
    int it = 0;
    for (; max_abs(F) > opt.tol; ++it) {
        if (it >= opt.max_iter)
            throw ModulationError("modulation Newton did not converge in " + std::to_string(opt.max_iter) +
                                  " iterations (residual " + std::to_string(max_abs(F)) + ")");
        Eigen::MatrixXd Jm(2 * k, 2 * k);
        for (int c = 0; c < 2 * k; ++c) {
            const int l = c / 2;
            const bool is_zeta = (c % 2 == 0);
            RVec col[2];
            for (int sgn = 0; sgn < 2; ++sgn) {
                SolitonConfig cp = cfg;
                const double h = sgn ? -opt.fd_step : opt.fd_step;
                std::vector<SpectralBundle> bp = b;
                if (is_zeta) {
                    cp.zeta[l] += h;
                    bp[l] = spectral_bundle(sp, cp.d(l));
                } else {
                    cp.theta[l] += h;
                }
                col[sgn] = orthogonality(sp, modulation_residual_field(sp, st, cp), cp, bp);
            }
            for (int r = 0; r < 2 * k; ++r) Jm(r, c) = (col[0][r] - col[1][r]) / (2 * opt.fd_step);
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jm);
        const auto sv = svd.singularValues();
        rec.jacobian_cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (!(rec.jacobian_cond < 1e12))
            throw ModulationError("modulation Jacobian singular (condition estimate " +
                                  std::to_string(rec.jacobian_cond) + ")");
        Eigen::VectorXd rhs(2 * k);
        for (int r = 0; r < 2 * k; ++r) rhs(r) = -F[r];
        Eigen::VectorXd dx = Jm.colPivHouseholderQr().solve(rhs);
        const double big = dx.cwiseAbs().maxCoeff();
        if (big > 0.5) dx *= 0.5 / big;  // damped step far from the root
        for (int l = 0; l < k; ++l) {
            cfg.zeta[l] += dx(2 * l);
            cfg.theta[l] += dx(2 * l + 1);
        }
        cfg.validate();
        b = bundles_for(sp, cfg);
        F = orthogonality(sp, modulation_residual_field(sp, st, cfg), cfg, b);
    }
    rec.iterations = it;
    rec.orth_residual = max_abs(F);
    rec.zeta = cfg.zeta;
    rec.theta = cfg.theta;
    const FieldPair q = modulation_residual_field(sp, st, cfg);
    rec.alpha1.resize(k);
    for (int l = 0; l < k; ++l)
        rec.alpha1[l] = proj_check(1, b[l], real_part(std::polar(1.0, -cfg.theta[l]) * q), sp);
    rec.q_norm = norm_H(q, sp);
    rec.A_minus = a_minus(q, cfg, sp);
    if (k >= 2) {
        const InteractionReport ir = interaction_integrals(cfg, sp.p, false);
        rec.J = ir.J;
        rec.Jcheck = ir.Jcheck;
    }
    rec.E = pde_energy(sp, st);
    return rec;
}

// ---- Toda reduction ----

TodaRhsCheck verify_toda_rhs(const SolitonConfig& cfg, double p, int n, double half_width) {
    cfg.validate();
    if (cfg.k() < 2) throw std::invalid_argument("verify_toda_rhs: needs k >= 2");
    const Space sp(build_grid(half_width > 0 ? half_width : default_half_width(cfg), n), p);
    const Physics ph(p);
    const int k = cfg.k();
    TodaRhsCheck out;
    out.k = k;
    out.p = p;
    out.cfg = cfg;
    const TodaParams par = toda_params(p);
    out.A = par.A;
    out.B = par.B;

    // R = |K|^{p-1} K - sum e^{i th_j} kappa_j^p
    CVec R(sp.n(), 0.0), K(sp.n(), 0.0);
    for (int j = 0; j < k; ++j) {
        const RVec kap = kappa_on(sp, cfg.zeta[j]);
        const cplx e = std::polar(1.0, cfg.theta[j]);
        for (std::size_t i = 0; i < sp.n(); ++i) {
            K[i] += e * kap[i];
            R[i] -= e * std::pow(kap[i], p);
        }
    }
    for (std::size_t i = 0; i < sp.n(); ++i) R[i] += std::pow(std::abs(K[i]), p - 1.0) * K[i];

    out.zeta_proj.resize(k);
    out.theta_proj.resize(k);
    for (int l = 0; l < k; ++l) {
        const SpectralBundle b = spectral_bundle(sp, cfg.d(l));
        FieldPair re = FieldPair::zeros(sp.n()), im = FieldPair::zeros(sp.n());
        const cplx rot = std::polar(1.0, -cfg.theta[l]);
        for (std::size_t i = 0; i < sp.n(); ++i) {
            const cplx r = rot * R[i];
            re.f2[i] = r.real();
            im.f2[i] = r.imag();
        }
        out.zeta_proj[l] = (p - 1.0) / (2.0 * ph.kappa0) * proj_check(0, b, re, sp);
        out.theta_proj[l] = proj_tilde(b, im, sp);
    }
    toda_rhs(par, 1.0, cfg.zeta, cfg.theta, out.zeta_toda, out.theta_toda);
    out.J = interaction_J(cfg.zeta, p);
    out.zeta_rel_err.resize(k);
    out.theta_rel_err.resize(k);
    double abs_max = 0.0;
    for (int l = 0; l < k; ++l) {
        const double ez = std::fabs(out.zeta_proj[l] - out.zeta_toda[l]);
        const double et = std::fabs(out.theta_proj[l] - out.theta_toda[l]);
        out.zeta_rel_err[l] = ez / (par.A * out.J);
        out.theta_rel_err[l] = et / (par.B * out.J);
        out.max_rel_err = std::max({out.max_rel_err, out.zeta_rel_err[l], out.theta_rel_err[l]});
        abs_max = std::max({abs_max, ez, et});
    }
    out.ratio_01 = abs_max / std::pow(out.J, 1.1);
    out.ratio_03 = abs_max / std::pow(out.J, 1.3);
    return out;
}

// ---- experiment ----

ExperimentResult run_experiment(const Space& sp, const SolitonConfig& init, const FieldPair* perturbation,
                                const ExperimentOptions& opt) {
    init.validate();
    PdeState st = multisoliton_state(sp, init);
    if (perturbation) {
        if (perturbation->size() != sp.n()) throw std::invalid_argument("run_experiment: perturbation size");
        st.u = perturbation->f1;
        st.v = perturbation->f2;
    }
    ExperimentResult res;
    SolitonConfig guess = init;
    double E_ref = 0.0, D_ref = 0.0, s_ref = 0.0;
    bool first = true;
    const double X = sp.grid.half_width;
    auto cb = [&](PdeState& s, const EvolveSample& smp) {
        ModulationRecord rec = modulation_fit(sp, s, guess, opt.mod);
        for (double z : rec.zeta)
            if (std::fabs(z) > X - opt.pde.boundary_margin)
                throw ContainmentBreach("soliton centre " + std::to_string(z) + " within " +
                                        std::to_string(opt.pde.boundary_margin) + " of the end of the line at s = " +
                                        std::to_string(s.s));
        rec.E = smp.E;
        if (!first && s.s > s_ref)
            rec.dissip_residual = ((smp.E - E_ref) + (smp.dissipated - D_ref)) / ((s.s - s_ref) * std::fabs(E_ref));
        guess = rec.config();
        E_ref = smp.E;
        if (opt.control_unstable) {
            const ModeBasis mb = mode_basis(rec.config(), sp);
            const FieldPair q = modulation_residual_field(sp, s, rec.config());
            const FieldPair qm = pi_minus(q, mb, sp);
            // pi_minus removes all 3k components; the zero-mode ones are
            // already ~tol after the fit, so this only takes out alpha1
            for (std::size_t i = 0; i < sp.n(); ++i) {
                s.u[i] += qm.f1[i] - q.f1[i];
                s.v[i] += qm.f2[i] - q.f2[i];
            }
            for (double a : rec.alpha1) res.control_total += std::fabs(a);
            E_ref = pde_energy(sp, s);
        }
        D_ref = smp.dissipated;
        s_ref = s.s;
        first = false;
        res.records.push_back(rec);
    };
    try {
        evolve(sp, st, opt.s_end, opt.fit_every, opt.pde, cb);
    } catch (const PdeError& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    } catch (const std::invalid_argument& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }
    return res;
}

std::vector<std::string> modulation_header(int k) {
    std::vector<std::string> h{"s"};
    for (const char* pre : {"zeta_", "theta_", "alpha1_"})
        for (int j = 1; j <= k; ++j) h.push_back(pre + std::to_string(j));
    for (const char* c : {"q_norm", "A_minus", "J", "Jcheck", "E", "dissip_residual"}) h.push_back(c);
    return h;
}

std::vector<std::vector<double>> modulation_rows(const std::vector<ModulationRecord>& recs) {
    std::vector<std::vector<double>> rows;
    for (const ModulationRecord& r : recs) {
        std::vector<double> row{r.s};
        row.insert(row.end(), r.zeta.begin(), r.zeta.end());
        row.insert(row.end(), r.theta.begin(), r.theta.end());
        row.insert(row.end(), r.alpha1.begin(), r.alpha1.end());
        for (double v : {r.q_norm, r.A_minus, r.J, r.Jcheck, r.E, r.dissip_residual}) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

TodaComparison compare_with_toda(const std::vector<ModulationRecord>& recs, double p, double A, double B,
                                 double min_gap, double skip, int half_window) {
    TodaComparison out;
    if (recs.empty()) return out;
    TodaParams par;
    par.p = p;
    par.A = A;
    par.B = B;
    const double s0 = recs.front().s;
    for (std::size_t i = half_window; i + half_window < recs.size(); ++i) {
        const ModulationRecord& r = recs[i];
        if (r.s - s0 < skip) continue;
        if (r.config().min_gap() < min_gap) continue;
        const ModulationRecord &lo = recs[i - half_window], &hi = recs[i + half_window];
        RVec dz, dth;
        toda_rhs(par, r.s, r.zeta, r.theta, dz, dth);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < r.zeta.size(); ++j) {
            const double meas = (hi.zeta[j] - lo.zeta[j]) / (hi.s - lo.s);
            num = std::max(num, std::fabs(meas - dz[j]));
            den = std::max(den, std::fabs(dz[j]));
        }
        const double e = den > 0 ? num / den : INFINITY;
        out.s.push_back(r.s);
        out.rel_err.push_back(e);
        out.max_rel_err = std::max(out.max_rel_err, e);
        ++out.used;
    }
    return out;
}

}  // namespace cwave
