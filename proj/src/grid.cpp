#include "cwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cwave {

MappedGrid build_grid(double half_width, int n) {
    if (!std::isfinite(half_width) || half_width <= 0.0)
        throw std::invalid_argument("build_grid: half-width must be finite and positive");
    if (n < 16) throw std::invalid_argument("build_grid: need at least 16 nodes, got " + std::to_string(n));
    MappedGrid g;
    g.half_width = half_width;
    g.n = n;
    g.dxi = 2.0 * half_width / (n - 1);
    g.xi.resize(n);
    g.y.resize(n);
    g.sech2.resize(n);
    // built from the centre out so that xi[m] == -xi[n-1-m] exactly
    for (int m = 0; m < n; ++m) g.xi[m] = (m - 0.5 * (n - 1)) * g.dxi;
    g.xi[0] = -half_width;
    g.xi[n - 1] = half_width;
    for (int m = 0; m < n / 2; ++m) g.xi[n - 1 - m] = -g.xi[m];
    for (int m = 0; m < n; ++m) {
        g.y[m] = std::tanh(g.xi[m]);
        g.sech2[m] = std::exp(2.0 * log_sech(g.xi[m]));
    }
    return g;
}

double log_sech(double x) {
    const double a = std::fabs(x);
    return std::log(2.0) - a - std::log1p(std::exp(-2.0 * a));
}

FieldPair operator+(const FieldPair& a, const FieldPair& b) {
    FieldPair r = a;
    for (std::size_t i = 0; i < r.f1.size(); ++i) {
        r.f1[i] += b.f1[i];
        r.f2[i] += b.f2[i];
    }
    return r;
}

FieldPair operator-(const FieldPair& a, const FieldPair& b) {
    FieldPair r = a;
    for (std::size_t i = 0; i < r.f1.size(); ++i) {
        r.f1[i] -= b.f1[i];
        r.f2[i] -= b.f2[i];
    }
    return r;
}

FieldPair operator*(cplx s, const FieldPair& a) {
    FieldPair r = a;
    for (std::size_t i = 0; i < r.f1.size(); ++i) {
        r.f1[i] *= s;
        r.f2[i] *= s;
    }
    return r;
}

FieldPair real_part(const FieldPair& a) {
    FieldPair r = FieldPair::zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.f1[i] = a.f1[i].real();
        r.f2[i] = a.f2[i].real();
    }
    return r;
}

FieldPair imag_part(const FieldPair& a) {
    FieldPair r = FieldPair::zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.f1[i] = a.f1[i].imag();
        r.f2[i] = a.f2[i].imag();
    }
    return r;
}

// ---- finite differences ----

namespace {

DiffOp make_band(int n, int width) {
    DiffOp d;
    d.n = n;
    d.width = width;
    d.start.assign(n, 0);
    d.w.assign((std::size_t)n * width, 0.0);
    return d;
}

void set_row(DiffOp& d, int row, int first, const std::vector<double>& c, double scale) {
    const int st = std::clamp(first, 0, d.n - d.width);
    d.start[row] = st;
    for (std::size_t k = 0; k < c.size(); ++k) d.w[(std::size_t)row * d.width + (first - st) + k] = c[k] * scale;
}

std::vector<double> reversed(std::vector<double> c, double sign) {
    std::reverse(c.begin(), c.end());
    for (double& v : c) v *= sign;
    return c;
}

}  // namespace

DiffOp make_d1(const MappedGrid& g, int order) {
    if (order != 4 && order != 6) throw std::invalid_argument("make_d1: order must be 4 or 6");
    const int n = g.n;
    const double h = g.dxi;
    const int width = order == 4 ? 5 : 7;
    DiffOp d = make_band(n, width);

    const std::vector<double> l0{-25, 48, -36, 16, -3}, l1{-3, -10, 18, -6, 1};
    const std::vector<double> c4{1, -8, 0, 8, -1}, c6{-1, 9, -45, 0, 45, -9, 1};
    for (int i = 0; i < n; ++i) {
        if (i == 0) set_row(d, i, 0, l0, 1.0 / (12 * h));
        else if (i == 1) set_row(d, i, 0, l1, 1.0 / (12 * h));
        else if (i == n - 1) set_row(d, i, n - 5, reversed(l0, -1), 1.0 / (12 * h));
        else if (i == n - 2) set_row(d, i, n - 5, reversed(l1, -1), 1.0 / (12 * h));
        else if (order == 6 && i >= 3 && i <= n - 4) set_row(d, i, i - 3, c6, 1.0 / (60 * h));
        else set_row(d, i, i - 2, c4, 1.0 / (12 * h));
    }
    return d;
}

DiffOp make_d2(const MappedGrid& g, int order) {
    if (order != 4 && order != 6) throw std::invalid_argument("make_d2: order must be 4 or 6");
    const int n = g.n;
    const double h2 = g.dxi * g.dxi;
    const int width = order == 4 ? 6 : 7;
    DiffOp d = make_band(n, width);

    const std::vector<double> l0{45, -154, 214, -156, 61, -10}, l1{10, -15, -4, 14, -6, 1};
    const std::vector<double> c4{-1, 16, -30, 16, -1}, c6{2, -27, 270, -490, 270, -27, 2};
    for (int i = 0; i < n; ++i) {
        if (i == 0) set_row(d, i, 0, l0, 1.0 / (12 * h2));
        else if (i == 1) set_row(d, i, 0, l1, 1.0 / (12 * h2));
        else if (i == n - 1) set_row(d, i, n - 6, reversed(l0, 1), 1.0 / (12 * h2));
        else if (i == n - 2) set_row(d, i, n - 6, reversed(l1, 1), 1.0 / (12 * h2));
        else if (order == 6 && i >= 3 && i <= n - 4) set_row(d, i, i - 3, c6, 1.0 / (180 * h2));
        else set_row(d, i, i - 2, c4, 1.0 / (12 * h2));
    }
    return d;
}

CVec DiffOp::apply(const CVec& in, Exec ex) const {
    if ((int)in.size() != n) throw std::invalid_argument("DiffOp::apply: size mismatch");
    CVec out(n);
    kern::banded_apply(start.data(), w.data(), width, (std::size_t)n, in.data(), out.data(), ex);
    return out;
}

double DiffOp::coeff(int row, int col) const {
    const int k = col - start[row];
    if (k < 0 || k >= width) return 0.0;
    return w[(std::size_t)row * width + k];
}

// ---- weighted space ----

Space::Space(MappedGrid g, double p_, int order_) : grid(std::move(g)), p(p_), order(order_) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("Space: exponent p must exceed 1");
    beta = 4.0 / (p - 1.0);
    const int n = grid.n;
    w_rho.resize(n);
    w_rho1.resize(n);
    w_dy.resize(n);
    for (int m = 0; m < n; ++m) {
        const double ls = log_sech(grid.xi[m]);
        const bool end = (m == 0 || m == n - 1);
        // end nodes also carry the tail beyond +-Xi, closed by assuming the
        // integrand flattens out there: int_Xi^inf sech^a = sech^a(Xi)/a
        auto wt = [&](double a) { return std::exp(a * ls) * (end ? 0.5 * grid.dxi + 1.0 / a : grid.dxi); };
        w_rho[m] = wt(beta + 2.0);
        w_rho1[m] = wt(beta);
        w_dy[m] = wt(2.0);
    }
    d1 = make_d1(grid, order);
    d2 = make_d2(grid, order);
}

const RVec& Space::weights(MeasureKind k) const {
    switch (k) {
        case MeasureKind::rho: return w_rho;
        case MeasureKind::rho_over_one_minus_y2: return w_rho1;
        case MeasureKind::dy: return w_dy;
    }
    throw std::logic_error("unknown measure");
}

void require_finite(const CVec& v, const char* what) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite value");
}

void require_finite(const RVec& v, const char* what) {
    for (double z : v)
        if (!std::isfinite(z)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

double integrate(const RVec& v, MeasureKind m, const Space& sp) {
    if (v.size() != sp.n()) throw std::invalid_argument("integrate: length does not match grid");
    require_finite(v, "integrate");
    const RVec& w = sp.weights(m);
    return kern::dot(v.data(), w.data(), v.size(), default_exec());
}

cplx integrate(const CVec& v, MeasureKind m, const Space& sp) {
    if (v.size() != sp.n()) throw std::invalid_argument("integrate: length does not match grid");
    require_finite(v, "integrate");
    RVec re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
    const RVec& w = sp.weights(m);
    const Exec ex = default_exec();
    return {kern::dot(re.data(), w.data(), v.size(), ex), kern::dot(im.data(), w.data(), v.size(), ex)};
}

double inner_phi(const FieldPair& q, const FieldPair& r, const Space& sp) {
    const std::size_t n = sp.n();
    if (q.f1.size() != n || r.f1.size() != n || q.f2.size() != n || r.f2.size() != n)
        throw std::invalid_argument("inner_phi: fields do not live on this grid");
    const Exec ex = default_exec();
    const CVec dq = sp.d1.apply(q.f1, ex), dr = sp.d1.apply(r.f1, ex);
    RVec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = q.f1[i].real() * r.f1[i].real() + q.f2[i].real() * r.f2[i].real();
        b[i] = dq[i].real() * dr[i].real();
    }
    return kern::dot(a.data(), sp.w_rho.data(), n, ex) + kern::dot(b.data(), sp.w_rho1.data(), n, ex);
}

double norm_H(const FieldPair& q, const Space& sp) {
    const std::size_t n = sp.n();
    if (q.f1.size() != n || q.f2.size() != n) throw std::invalid_argument("norm_H: fields do not live on this grid");
    require_finite(q.f1, "norm_H");
    require_finite(q.f2, "norm_H");
    const Exec ex = default_exec();
    const CVec dq = sp.d1.apply(q.f1, ex);
    RVec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::norm(q.f1[i]) + std::norm(q.f2[i]);
        b[i] = std::norm(dq[i]);
    }
    return std::sqrt(kern::dot(a.data(), sp.w_rho.data(), n, ex) + kern::dot(b.data(), sp.w_rho1.data(), n, ex));
}

double norm_H0(const CVec& r, const Space& sp) {
    const std::size_t n = sp.n();
    if (r.size() != n) throw std::invalid_argument("norm_H0: field does not live on this grid");
    require_finite(r, "norm_H0");
    const Exec ex = default_exec();
    const CVec dr = sp.d1.apply(r, ex);
    RVec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::norm(r[i]);
        b[i] = std::norm(dr[i]);
    }
    return std::sqrt(kern::dot(a.data(), sp.w_rho.data(), n, ex) + kern::dot(b.data(), sp.w_rho1.data(), n, ex));
}

double tail_magnitude(const CVec& v, MeasureKind m, const Space& sp) {
    const RVec& w = sp.weights(m);
    const std::size_t n = sp.n();
    (void)w;
    const double a = m == MeasureKind::rho ? sp.beta + 2.0 : m == MeasureKind::dy ? 2.0 : sp.beta;
    const double dens = std::exp(a * log_sech(sp.grid.half_width));
    return std::max(std::abs(v[0]), std::abs(v[n - 1])) * dens;
}

}  // namespace cwave
