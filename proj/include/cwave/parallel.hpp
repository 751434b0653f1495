#pragma once
// Execution policy for the data-parallel kernels.  Every kernel has a
// serial reference path; the OpenMP path must reproduce it bit-for-bit,
// which is why reductions go through fixed-size blocks rather than an
// omp reduction clause.
#include <complex>
#include <cstddef>

namespace cwave {

enum class Exec { serial, parallel };

// process-wide default; tests flip it to compare the two paths
Exec default_exec();
void set_default_exec(Exec e);
void set_threads(int n);  // <= 0 leaves the OpenMP default alone

namespace kern {

constexpr std::size_t kReduceBlocks = 64;

// sum_i a[i]*b[i], summed block-wise in a fixed order
double dot(const double* a, const double* b, std::size_t n, Exec ex);
double sum(const double* a, std::size_t n, Exec ex);

// out[i] = sum_k w[i*width+k] * (in[start[i]+k] - in[i]).  Rows must sum
// to zero (true for derivative stencils); differencing against the centre
// value makes constants map to exactly zero, which matters because the
// operators get multiplied by cosh^2 xi ~ 1e11 near the ends
void banded_apply(const int* start, const double* w, int width, std::size_t n,
                  const std::complex<double>* in, std::complex<double>* out, Exec ex);

}  // namespace kern
}  // namespace cwave
