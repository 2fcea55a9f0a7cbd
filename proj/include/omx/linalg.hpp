/**
 * @file linalg.hpp
 * @brief Small dense complex kernels: LU solves, eigenvalues, polynomial
 *        roots and eigenvalue branch tracking. Sized for n <= 6.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace omx {

using cplx = std::complex<double>;

// Row-major dense complex matrix with value semantics.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const cplx> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cplx> data() const noexcept { return data_; }

    CMatrix transpose() const;
    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    std::vector<cplx> column(std::size_t j) const;
    double norm_fro() const;
    double norm_one() const;
    cplx trace() const;
    bool all_finite() const;
    std::string to_string() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> x);

// LU with partial pivoting, kept around for repeated right-hand sides.
class LuFactor {
public:
    explicit LuFactor(CMatrix a);
    CMatrix solve(const CMatrix& rhs) const;
    std::vector<cplx> solve(std::span<const cplx> rhs) const;
    // Hager-style 1-norm estimate of the inverse times ||A||_1.
    double condition_estimate() const;
    bool singular() const noexcept { return singular_; }

private:
    CMatrix lu_;
    std::vector<std::size_t> piv_;
    double anorm_ = 0.0;
    bool singular_ = false;
};

CMatrix solve(const CMatrix& a, const CMatrix& rhs);
CMatrix inverse(const CMatrix& a);

// Solves (M - i*omega*I) X = rhs. Throws NumericError when the shifted
// matrix is numerically singular (condition estimate above 1e12).
CMatrix resolvent_solve(const CMatrix& m, double omega, const CMatrix& rhs);

struct EigenSet {
    std::vector<cplx> values;
    CMatrix vectors;               // column k pairs with values[k]
    std::vector<double> residuals; // ||M v - lambda v|| / ||M||
};

// Hessenberg reduction + shifted QR; falls back to the companion matrix of
// the characteristic polynomial if QR stalls. Residuals are checked.
EigenSet eigendecompose(const CMatrix& m);

// Eigenvalues only: QR with the companion fallback. Stays usable near
// defective points where eigendecompose rejects the eigenvectors.
std::vector<cplx> eigenvalues(const CMatrix& m);

std::vector<cplx> eigenvalues_qr(const CMatrix& m);
std::vector<cplx> eigenvalues_companion(const CMatrix& m);

// Characteristic polynomial det(zI - M), highest power first, leading 1.
std::vector<cplx> characteristic_polynomial(const CMatrix& m);

// All roots of c[0] z^n + ... + c[n] via companion eigenvalues.
std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs);

struct BranchTracks {
    // branches[j][k] = value of branch j at sweep point k
    std::vector<std::vector<cplx>> branches;
    bool tie = false;
};

// Greedy nearest-neighbour tracking: point 0 is matched to the anchors,
// each later point to its predecessor, always taking the globally closest
// remaining pair first.
BranchTracks track_branches(std::span<const std::vector<cplx>> sweep, std::span<const cplx> anchors);

// Greedy matching of one value set to references; result[j] is the index
// into `values` assigned to reference j.
std::vector<std::size_t> match_nearest(std::span<const cplx> refs, std::span<const cplx> values, bool* tie = nullptr);

} // namespace omx
