#pragma once
// Quadrature constants of the modulation equations.  Everything here is
// computed at runtime; closed forms for p = 3 only appear in tests.
#include <string>

#include <json.hpp>

#include "cwave/grid.hpp"

namespace cwave {

struct ConstantsTable {
    double p = 0.0;
    double kappa0 = 0.0;
    double int_rho = 0.0;                 // int rho dy
    double int_rho_over = 0.0;            // int rho/(1-y^2) dy
    double c_check0 = 0.0, c_check1 = 0.0;
    double c_tilde0 = 0.0;
    double c_check2 = 0.0, c_tilde2 = 0.0;
    double A = 0.0;          // primitive formula with int rho and the tanh-weighted z-integral
    double B = 0.0;          // c~0 c~2
    double A_identity = 0.0; // p(p-1) c0 c2 / (2 kappa0^2)
    double B_direct = 0.0;   // (p-1)/((p+3) int rho) kappa0^{p-1} 2^{2/(p-1)} I0
    double A_identity_residual = 0.0;
    double B_identity_residual = 0.0;
    double ratio_check_residual = 0.0;  // |A/B - (p+3)/2|
    bool A_positive = false;
    std::string h_branch;
    double line_half_width = 0.0;
    int line_nodes = 0;

    // largest of the three residuals
    double worst_residual() const;
};

// The quadrature line keeps grid.n nodes but widens the half-width when the
// slowest integrand (sech^{4/(p-1)}) would otherwise leave a visible tail.
ConstantsTable constants_table(double p, const MappedGrid& grid);

nlohmann::json to_json(const ConstantsTable& t);

}  // namespace cwave
