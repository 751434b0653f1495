#pragma once
// Thin wrapper over LAPACK's general band solver (dgbsv).
#include <vector>

namespace cwave {

class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);
    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }
    void add(int i, int j, double v);
    double get(int i, int j) const;
    void clear();
    std::vector<double> matvec(const std::vector<double>& x) const;

    // Solves A x = b in place of b.  Throws std::runtime_error with the
    // pivot index when the factorization hits an exact zero.
    void solve(std::vector<double>& b) const;

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;  // LAPACK column-major band layout
    friend class BandLU;
};

// LU factors of a BandMatrix (dgbtrf), reused across right-hand sides.
class BandLU {
public:
    explicit BandLU(const BandMatrix& A);
    int n() const { return n_; }
    // nrhs columns stored one after another, each of length n
    void solve(std::vector<double>& b, int nrhs = 1) const;

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> lu_;
    std::vector<int> ipiv_;
};

}  // namespace cwave
