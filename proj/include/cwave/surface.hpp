#pragma once
// Physical-space equation u_tt = u_xx + |u|^{p-1} u on a uniform grid, and
// the blow-up curve T(x) read off from the ODE-type growth at each node.
//
// Time stepping is classical RK4 with dt = min(cfl dx, eta / max|u|^{(p-1)/2})
// so the step follows the local nonlinear time scale as |u| grows.  A node
// whose modulus passes the ceiling is frozen; everything inside the forward
// light cone of a frozen node is no longer the true solution, so each node
// carries a deadline min_i (t_i + |x - x_i|) after which it is frozen too and
// its samples are ignored.
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwave/grid.hpp"
#include "cwave/parallel.hpp"

namespace cwave {

struct SurfaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoBlowup : SurfaceError {
    using SurfaceError::SurfaceError;
};
struct DomainTooSmall : SurfaceError {
    using SurfaceError::SurfaceError;
};

struct PhysicalOptions {
    double p = 3.0;
    double half_width = 2.0;  // domain [-X, X], homogeneous Neumann ends
    double dx = 1.0 / 16384;
    double cfl = 0.9;          // dt / dx upper bound
    double eta = 0.05;         // dt |u|^{(p-1)/2} upper bound
    double t_end = 2.0;
    double ceiling = 1e3;      // freeze a node once |u| passes this
    double fit_floor = 1e2;    // T fits use samples with fit_floor <= |u| <= ceiling
    double track_radius = 0.5; // results are only trusted for |x| <= this
    // characteristic_scan also runs at 2 dx and adds |T_dx - T_2dx| / 3 (the
    // second-order Richardson estimate) to every confidence
    bool richardson = true;
    Exec exec = Exec::parallel;
};

struct PhysicalState {
    RVec x;
    double dx = 0.0, t = 0.0;
    CVec u, ut;
    std::size_t n() const { return x.size(); }
};

// x_i = -X + i dx, n odd so x = 0 is a node; throws unless X is a multiple of dx
PhysicalState physical_state(const PhysicalOptions& opt, const std::function<cplx(double)>& u0,
                             const std::function<cplx(double)>& u1);

// u_xx + |u|^{p-1} u with mirror ends; nodes with active[i] == 0 get zero
void physical_rhs(const PhysicalState& st, const std::vector<char>& active, double p, CVec& out, Exec ex);

// O(n) two-pass distance transform: deadline_i = min_j (t_j + |x_i - x_j|)
void cone_deadlines(const std::vector<double>& freeze_time, double dx, std::vector<double>& deadline);

struct NodeFit {
    double T = NAN, conf = NAN;
    int samples = 0;
};

struct PhysicalRun {
    PhysicalState state;              // at the end of the run
    std::vector<NodeFit> fit;         // per node
    std::vector<double> freeze_time;  // inf when never frozen
    std::vector<double> deadline;
    std::vector<double> hist_t, hist_max;  // max |u| over active nodes per step
    std::vector<double> grad0_t, grad0;    // |u_x(0, t)| while the centre is valid
    long steps = 0;
    int frozen = 0;
};

PhysicalRun evolve_physical(PhysicalState st, const PhysicalOptions& opt);

// |u| = c (T - t)^{-2/(p-1)} fitted as |u|^{-(p-1)/2} = a (T - t); conf is the
// regression standard error plus the shift between the full band and its
// upper half
NodeFit fit_blowup_time(const std::vector<double>& t, const std::vector<double>& amp, double p);

// T at a characteristic centre, from |u_x(0,t)| ~ C (T - t)^{-(p+1)/(p-1)} |log(T - t)|^{-1/2}
NodeFit fit_gradient_blowup(const std::vector<double>& t, const std::vector<double>& g, double p);

struct BlowupCurve {
    RVec x, T, T_conf, slope_left, slope_right;
};

struct CharacteristicReport {
    BlowupCurve curve;
    double T0 = NAN, T0_conf = NAN;
    double lipschitz_worst = 0.0;   // max (|dT| - |dx| - tol), <= 0 passes
    bool lipschitz_pass = false;
    double corner_margin = 0.0;     // min (T(x) - T0 + |x| + tol), >= 0 passes
    bool corner_pass = false;
    double symmetry_worst = 0.0;    // max |T(x) - T(-x)| - tol
    bool symmetry_pass = false;
    RVec law_x, law_gap;            // dyadic x and 1 - |T'(x)|
    double beta = NAN, beta_target = 0.0, beta_fit_rms = NAN, gamma = NAN;
    bool beta_pass = false;
    long steps = 0;
};

struct OddProfile {
    double amplitude = 2.0;
    double width = 0.5;
    double phase = 0.0;
};

// u0 = e^{i phase} A tanh(x / width), u1 = 0
PhysicalState odd_state(const OddProfile& prof, const PhysicalOptions& opt);

// dyadic x = 2^{-m/4}, m_lo <= m <= m_hi, both signs
CharacteristicReport characteristic_scan(const OddProfile& prof, const PhysicalOptions& opt, int m_lo = 8,
                                         int m_hi = 32);
// coarse, when given, is the same problem at 2 dx (see PhysicalOptions::richardson)
CharacteristicReport analyse_curve(const PhysicalRun& run, const PhysicalOptions& opt, int m_lo, int m_hi,
                                   const PhysicalRun* coarse = nullptr);

std::vector<std::string> curve_header();
std::vector<std::vector<double>> curve_rows(const BlowupCurve& c);

}  // namespace cwave
