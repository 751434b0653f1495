#include "cwave/parallel.hpp"

#include <algorithm>
#include <array>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cwave {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec e) { g_exec.store(e); }

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

namespace kern {

namespace {

template <class F>
double blocked(std::size_t n, Exec ex, F&& term) {
    std::array<double, kReduceBlocks> part{};
    const std::size_t bs = (n + kReduceBlocks - 1) / kReduceBlocks;
    auto one = [&](std::size_t b) {
        const std::size_t lo = b * bs, hi = std::min(n, lo + bs);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        part[b] = s;
    };
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t b = 0; b < kReduceBlocks; ++b) one(b);
    } else {
        for (std::size_t b = 0; b < kReduceBlocks; ++b) one(b);
    }
    double s = 0.0;
    for (double v : part) s += v;
    return s;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n, Exec ex) {
    return blocked(n, ex, [&](std::size_t i) { return a[i] * b[i]; });
}

double sum(const double* a, std::size_t n, Exec ex) {
    return blocked(n, ex, [&](std::size_t i) { return a[i]; });
}

void banded_apply(const int* start, const double* w, int width, std::size_t n,
                  const std::complex<double>* in, std::complex<double>* out, Exec ex) {
    auto row = [&](std::size_t i) {
        const double* wi = w + i * width;
        const std::complex<double>* f = in + start[i];
        const std::complex<double> c = in[i];
        std::complex<double> acc = 0.0;
        for (int k = 0; k < width; ++k) acc += wi[k] * (f[k] - c);
        out[i] = acc;
    };
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) row(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) row(i);
    }
}

}  // namespace kern
}  // namespace cwave
