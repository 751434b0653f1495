#pragma once
// Uniform grid in xi with y = tanh(xi).  All weighted integrals on (-1,1)
// become trapezoid sums in xi against a power of sech, which is where the
// spectral accuracy comes from.
#include <complex>
#include <stdexcept>
#include <vector>

#include "cwave/parallel.hpp"

namespace cwave {

using cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

struct MappedGrid {
    double half_width = 0.0;
    int n = 0;
    double dxi = 0.0;
    RVec xi;
    RVec y;      // tanh(xi)
    RVec sech2;  // 1 - y^2, computed from xi directly to keep relative accuracy
};

MappedGrid build_grid(double half_width, int n);

struct FieldPair {
    CVec f1, f2;
    static FieldPair zeros(std::size_t n) { return {CVec(n), CVec(n)}; }
    std::size_t size() const { return f1.size(); }
};

FieldPair operator+(const FieldPair& a, const FieldPair& b);
FieldPair operator-(const FieldPair& a, const FieldPair& b);
FieldPair operator*(cplx s, const FieldPair& a);
FieldPair real_part(const FieldPair& a);
FieldPair imag_part(const FieldPair& a);  // returned as real-valued pair

enum class MeasureKind { rho, rho_over_one_minus_y2, dy };

// log(sech x) without overflow
double log_sech(double x);

// Finite-difference operator stored as a fixed-width band: row i reads
// in[start[i] .. start[i]+width).
struct DiffOp {
    int n = 0;
    int width = 0;
    std::vector<int> start;
    RVec w;

    template <class T>
    std::vector<T> apply(const std::vector<T>& in) const {
        if ((int)in.size() != n) throw std::invalid_argument("DiffOp::apply: size mismatch");
        std::vector<T> out(n);
        for (int i = 0; i < n; ++i) {
            T acc{};
            const T c = in[i];
            const double* wi = &w[(std::size_t)i * width];
            for (int k = 0; k < width; ++k) acc += wi[k] * (in[start[i] + k] - c);  // see kern::banded_apply
            out[i] = acc;
        }
        return out;
    }
    CVec apply(const CVec& in, Exec ex) const;
    double coeff(int row, int col) const;  // 0 outside the band
};

// centered stencils of the given order (4 or 6) in the interior; the
// rows that do not fit use one-sided 4th-order stencils
DiffOp make_d1(const MappedGrid& g, int order = 4);
DiffOp make_d2(const MappedGrid& g, int order = 4);

// Grid plus the exponent p of the weight rho = (1-y^2)^{2/(p-1)}.
struct Space {
    MappedGrid grid;
    double p = 3.0;
    double beta = 2.0;  // 4/(p-1)
    int order = 4;
    RVec w_rho;   // trapezoid weight * sech^{beta+2}
    RVec w_rho1;  // trapezoid weight * sech^{beta}
    RVec w_dy;    // trapezoid weight * sech^2
    DiffOp d1, d2;

    Space(MappedGrid g, double p, int order = 4);
    std::size_t n() const { return (std::size_t)grid.n; }
    const RVec& weights(MeasureKind k) const;
};

double integrate(const RVec& v, MeasureKind m, const Space& sp);
cplx integrate(const CVec& v, MeasureKind m, const Space& sp);

// phi(q, r) on real parts: int (q1 r1 + q1' r1' (1-y^2) + q2 r2) rho dy
double inner_phi(const FieldPair& q, const FieldPair& r, const Space& sp);
double norm_H(const FieldPair& q, const Space& sp);
double norm_H0(const CVec& r, const Space& sp);

// largest |v| * density at the two outermost nodes; used as a truncation
// sanity check
double tail_magnitude(const CVec& v, MeasureKind m, const Space& sp);

void require_finite(const CVec& v, const char* what);
void require_finite(const RVec& v, const char* what);

}  // namespace cwave
