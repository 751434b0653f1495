#include "cwave/constants.hpp"

#include <algorithm>
#include <cmath>

#include "cwave/soliton.hpp"

namespace cwave {

double ConstantsTable::worst_residual() const {
    return std::max({A_identity_residual, B_identity_residual, ratio_check_residual});
}

ConstantsTable constants_table(double p, const MappedGrid& grid) {
    const Physics ph(p);
    ConstantsTable t;
    t.p = p;
    t.kappa0 = ph.kappa0;
    t.h_branch = h_branch(p);

    // tails: sech^beta decays at rate beta, the z-integrands at rate >= 2;
    // 36 e-folds puts the truncation far below double precision
    const double rate = std::min(ph.beta, 2.0);
    const double Z = std::max(grid.half_width, 36.0 / rate);
    const Space sp(build_grid(Z, grid.n), p);
    t.line_half_width = Z;
    t.line_nodes = grid.n;

    const RVec one(sp.n(), 1.0);
    t.int_rho = integrate(one, MeasureKind::rho, sp);
    t.int_rho_over = integrate(one, MeasureKind::rho_over_one_minus_y2, sp);
    t.c_check1 = 1.0 / inv_c_check(1, sp);
    t.c_check0 = 1.0 / inv_c_check(0, sp);
    t.c_tilde0 = 1.0 / inv_c_tilde(sp);

    // I1 = int cosh^{-2p/(p-1)} e^{2z/(p-1)} tanh z dz, I0 the same without tanh
    const double a = 1.0 / (p - 1.0);
    double I1 = 0.0, I0 = 0.0;
    {
        RVec f1(sp.n()), f0(sp.n());
        for (std::size_t m = 0; m < sp.n(); ++m) {
            const double z = sp.grid.xi[m];
            const double tw = (m == 0 || m + 1 == sp.n()) ? 0.5 * sp.grid.dxi : sp.grid.dxi;
            const double g = std::exp(2.0 * p * a * log_sech(z) + 2.0 * a * z);
            f0[m] = tw * g;
            f1[m] = tw * g * std::tanh(z);
        }
        I0 = kern::sum(f0.data(), f0.size(), Exec::serial);
        I1 = kern::sum(f1.data(), f1.size(), Exec::serial);
    }
    const double two_pow = std::pow(2.0, 2.0 * a);
    t.c_check2 = two_pow * std::pow(ph.kappa0, p + 1.0) * I1;
    t.c_tilde2 = two_pow * std::pow(ph.kappa0, p + 1.0) * I0;

    t.A = p * (p - 1.0) / (2.0 * t.int_rho) * std::pow(ph.kappa0, p - 1.0) * two_pow * I1;
    t.B = t.c_tilde0 * t.c_tilde2;
    t.A_identity = p * (p - 1.0) * t.c_check0 * t.c_check2 / (2.0 * ph.kappa0 * ph.kappa0);
    t.B_direct = (p - 1.0) / ((p + 3.0) * t.int_rho) * std::pow(ph.kappa0, p - 1.0) * two_pow * I0;
    t.A_identity_residual = std::fabs(t.A - t.A_identity);
    t.B_identity_residual = std::fabs(t.B - t.B_direct);
    t.ratio_check_residual = std::fabs(t.A / t.B - 0.5 * (p + 3.0));
    t.A_positive = t.A > 0.0;
    return t;
}

nlohmann::json to_json(const ConstantsTable& t) {
    return {
        {"p", t.p},
        {"kappa0", t.kappa0},
        {"int_rho", t.int_rho},
        {"int_rho_over_one_minus_y2", t.int_rho_over},
        {"c_check_0", t.c_check0},
        {"c_check_1", t.c_check1},
        {"c_tilde_0", t.c_tilde0},
        {"c_check_2", t.c_check2},
        {"c_tilde_2", t.c_tilde2},
        {"A", t.A},
        {"B", t.B},
        {"A_identity", t.A_identity},
        {"B_direct", t.B_direct},
        {"A_identity_residual", t.A_identity_residual},
        {"B_identity_residual", t.B_identity_residual},
        {"ratio_check_residual", t.ratio_check_residual},
        {"A_positive", t.A_positive},
        {"h_branch", t.h_branch},
        {"quadrature", {{"half_width", t.line_half_width}, {"nodes", t.line_nodes}}},
    };
}

}  // namespace cwave
