#include "cwave/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cwave {

BandMatrix::BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1) {
    if (n <= 0 || kl < 0 || ku < 0) throw std::invalid_argument("BandMatrix: bad shape");
    ab_.assign((std::size_t)ld_ * n_, 0.0);
}

void BandMatrix::add(int i, int j, double v) {
    if (j - i > ku_ || i - j > kl_) throw std::out_of_range("BandMatrix::add outside band");
    ab_[(std::size_t)(kl_ + ku_ + i - j) + (std::size_t)j * ld_] += v;
}

double BandMatrix::get(int i, int j) const {
    if (j - i > ku_ || i - j > kl_) return 0.0;
    return ab_[(std::size_t)(kl_ + ku_ + i - j) + (std::size_t)j * ld_];
}

void BandMatrix::clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }

std::vector<double> BandMatrix::matvec(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
        double s = 0.0;
        for (int j = j0; j <= j1; ++j) s += get(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

void BandMatrix::solve(std::vector<double>& b) const {
    if ((int)b.size() != n_) throw std::invalid_argument("BandMatrix::solve: rhs size");
    std::vector<double> lu = ab_;  // dgbsv overwrites the factor
    std::vector<lapack_int> ipiv(n_);
    const lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, 1, lu.data(), ld_, ipiv.data(), b.data(), n_);
    if (info > 0)
        throw std::runtime_error("banded solve: singular at row " + std::to_string(info) + " of " +
                                 std::to_string(n_));
    if (info < 0) throw std::logic_error("banded solve: bad argument " + std::to_string(-info));
}

BandLU::BandLU(const BandMatrix& A) : n_(A.n_), kl_(A.kl_), ku_(A.ku_), ld_(A.ld_), lu_(A.ab_), ipiv_(A.n_) {
    std::vector<lapack_int> piv(n_);
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, lu_.data(), ld_, piv.data());
    if (info > 0)
        throw std::runtime_error("banded factorization: singular at row " + std::to_string(info) + " of " +
                                 std::to_string(n_));
    if (info < 0) throw std::logic_error("banded factorization: bad argument " + std::to_string(-info));
    for (int i = 0; i < n_; ++i) ipiv_[i] = (int)piv[i];
}

void BandLU::solve(std::vector<double>& b, int nrhs) const {
    if ((int)b.size() != n_ * nrhs) throw std::invalid_argument("BandLU::solve: rhs size");
    std::vector<lapack_int> piv(ipiv_.begin(), ipiv_.end());
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, nrhs, lu_.data(), ld_, piv.data(),
                                           b.data(), n_);
    if (info != 0) throw std::logic_error("banded back-substitution: bad argument " + std::to_string(-info));
}

}  // namespace cwave
