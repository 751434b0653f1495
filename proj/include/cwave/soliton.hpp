#pragma once
// Solitons kappa(d, y), the two linearized operators around them, their
// dual eigenfunctions, projectors and quadratic forms.
//
// Throughout, zeta = -atanh(d) is the soliton centre in xi; on the grid
// kappa(-tanh zeta, tanh xi) = kappa0 * (cosh xi / cosh(xi - zeta))^{2/(p-1)}.
#include <string>
#include <utility>
#include <vector>

#include "cwave/grid.hpp"

namespace cwave {

struct Physics {
    double p;
    double kappa0;  // (2(p+1)/(p-1)^2)^{1/(p-1)}
    double beta;    // 4/(p-1)
    double c;       // 2(p+1)/(p-1)^2
    double gamma;   // (p+3)/(p-1)
    explicit Physics(double p);
};

// pointwise formulas in (d, y)
double kappa(double d, double y, double p);
double kappa_ddiff(double d, double y, double p);
// (kappa*_1, kappa*_2); throws if 1 + d y + nu <= 0
std::pair<double, double> kappa_star(double d, double nu, double y, double p);

// on the grid, in the overflow-free xi form
RVec kappa_on(const Space& sp, double zeta);
FieldPair kappa_star_on(const Space& sp, double d, double nu);

struct SolitonConfig {
    RVec zeta;
    RVec theta;  // unwrapped
    int k() const { return (int)zeta.size(); }
    double d(int i) const;
    // throws unless sizes agree and zeta is strictly increasing
    void validate() const;
    double min_gap() const;
};

struct SpectralBundle {
    double d = 0.0, zeta = 0.0;
    FieldPair F1, F0;  // eigenfunctions of the "check" operator, lambda = 1, 0
    FieldPair W1, W0;  // their duals under phi
    FieldPair Ft0, Wt0;
    RVec psi_check, psi_tilde;
    double c1 = 0.0, c0 = 0.0, ct0 = 0.0;
    const FieldPair& W(int lambda) const { return lambda == 1 ? W1 : W0; }
    const FieldPair& F(int lambda) const { return lambda == 1 ? F1 : F0; }
};

// normalizers 1/c_lambda and 1/c~_0, by quadrature on sp
double inv_c_check(int lambda, const Space& sp);
double inv_c_tilde(const Space& sp);

// second component closed form, first from the banded elliptic solve
SpectralBundle spectral_bundle(const Space& sp, double d);

// first component of a dual eigenfunction: solves
//   (-L + 1) r = (lambda - gamma) r2 - 2y r2' + 8/(p-1) r2/(1-y^2)
// given r2 and its xi-derivative at the nodes
RVec solve_dual_first(const Space& sp, double lambda, const RVec& r2, const RVec& r2_xi);

// applies the linearized operator around kappa(d) (check or tilde) to a
// real pair using the grid stencils
FieldPair apply_L_check(const Space& sp, const SpectralBundle& b, const FieldPair& r);
FieldPair apply_L_tilde(const Space& sp, const SpectralBundle& b, const FieldPair& r);
// L r = cosh^2 xi (r_xixi - beta tanh xi r_xi)
CVec apply_L(const Space& sp, const CVec& r);

double proj_check(int lambda, const SpectralBundle& b, const FieldPair& r, const Space& sp);
double proj_check(int lambda, double d, const FieldPair& r, const Space& sp);
double proj_tilde(const SpectralBundle& b, const FieldPair& r, const Space& sp);
double proj_tilde(double d, const FieldPair& r, const Space& sp);

CVec multisoliton_K(const SolitonConfig& cfg, const Space& sp);

// int (-psi q1 r1 + q1' r1' (1-y^2) + q2 r2) rho, real parts
double bilinear_check(const SpectralBundle& b, const FieldPair& q, const FieldPair& r, const Space& sp);
double bilinear_tilde(const SpectralBundle& b, const FieldPair& q, const FieldPair& r, const Space& sp);
// quadratic form of the linearization around K, complex fields
double bilinear_PhiK(const CVec& K, const FieldPair& r, const FieldPair& rp, const Space& sp);
double bilinear_PhiK(const SolitonConfig& cfg, const FieldPair& r, const FieldPair& rp, const Space& sp);

// Removes the 3k nonnegative directions
//   e^{i th_l} F1(d_l), e^{i th_l} F0(d_l), i e^{i th_l} Ft0(d_l).
// The coefficients solve the 3k x 3k Gram system of the dual functionals,
// so the result is annihilated exactly even when solitons overlap.
struct ModeBasis {
    SolitonConfig cfg;
    std::vector<SpectralBundle> bundles;
    std::vector<FieldPair> directions;  // 3k, ordered (F1, F0, iFt0) per soliton
    std::vector<double> gram;           // row-major 3k x 3k
};
ModeBasis mode_basis(const SolitonConfig& cfg, const Space& sp);
std::vector<double> mode_functionals(const ModeBasis& mb, const FieldPair& q, const Space& sp);
FieldPair pi_minus(const FieldPair& q, const ModeBasis& mb, const Space& sp);
FieldPair pi_minus(const FieldPair& q, const SolitonConfig& cfg, const Space& sp);
double a_minus(const FieldPair& q, const ModeBasis& mb, const Space& sp);
double a_minus(const FieldPair& q, const SolitonConfig& cfg, const Space& sp);

// ---- interaction integrals ----

// weight h of the q-size estimate, piecewise in p
double h_weight(double gap, double p);
std::string h_branch(double p);

struct InteractionReport {
    int k = 0;
    double J = 0.0, Jbar = 0.0, Jcheck = 0.0;
    RVec J_l;
    RVec separators;  // tanh of the midpoints, k-1 entries
    // flattened [i][j][l] tables, k^3 entries each
    RVec A_check, A_tilde, B;
    double at(const RVec& t, int i, int j, int l) const { return t[((std::size_t)i * k + j) * k + l]; }
};

InteractionReport interaction_integrals(const SolitonConfig& cfg, double p, bool tables = true);

}  // namespace cwave
