#include "omx/linalg.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace omx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

} // namespace

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
{
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw std::invalid_argument("CMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n)
{
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> d)
{
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::transpose() const
{
    CMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
{
    if (r0 + nr > rows_ || c0 + nc > cols_)
        throw std::out_of_range("CMatrix::block");
    CMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
            b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

std::vector<cplx> CMatrix::column(std::size_t j) const
{
    std::vector<cplx> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        c[i] = (*this)(i, j);
    return c;
}

double CMatrix::norm_fro() const
{
    double s = 0.0;
    for (const auto& z : data_)
        s += std::norm(z);
    return std::sqrt(s);
}

double CMatrix::norm_one() const
{
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

cplx CMatrix::trace() const
{
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
        t += (*this)(i, i);
    return t;
}

bool CMatrix::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

std::string CMatrix::to_string() const
{
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < rows_; ++i) {
        os << "[";
        for (std::size_t j = 0; j < cols_; ++j)
            os << (j ? ", " : "") << (*this)(i, j);
        os << "]\n";
    }
    return os.str();
}

CMatrix& CMatrix::operator+=(const CMatrix& o)
{
    require_same_shape(*this, o, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o)
{
    require_same_shape(*this, o, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] -= o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s)
{
    for (auto& z : data_)
        z *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("operator*: inner dimension mismatch");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{})
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> x)
{
    if (a.cols() != x.size())
        throw std::invalid_argument("operator*: vector length mismatch");
    std::vector<cplx> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            y[i] += a(i, j) * x[j];
    return y;
}

// ---------------------------------------------------------------- LU

LuFactor::LuFactor(CMatrix a) : lu_(std::move(a)), piv_(lu_.rows())
{
    if (!lu_.square())
        throw std::invalid_argument("LuFactor: matrix not square");
    const std::size_t n = lu_.rows();
    anorm_ = lu_.norm_one();
    std::iota(piv_.begin(), piv_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                p = i;
            }
        if (best == 0.0 || !std::isfinite(best)) {
            singular_ = true;
            continue;
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(lu_(k, j), lu_(p, j));
            std::swap(piv_[k], piv_[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j)
                lu_(i, j) -= f * lu_(k, j);
        }
    }
}

std::vector<cplx> LuFactor::solve(std::span<const cplx> rhs) const
{
    const std::size_t n = lu_.rows();
    if (rhs.size() != n)
        throw std::invalid_argument("LuFactor::solve: length mismatch");
    if (singular_)
        throw NumericError("LuFactor::solve: singular matrix");
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = rhs[piv_[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j)
            x[ii] -= lu_(ii, j) * x[j];
        x[ii] /= lu_(ii, ii);
    }
    return x;
}

CMatrix LuFactor::solve(const CMatrix& rhs) const
{
    CMatrix x(rhs.rows(), rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        const auto col = solve(std::span<const cplx>(rhs.column(j)));
        for (std::size_t i = 0; i < rhs.rows(); ++i)
            x(i, j) = col[i];
    }
    return x;
}

double LuFactor::condition_estimate() const
{
    if (singular_)
        return std::numeric_limits<double>::infinity();
    const std::size_t n = lu_.rows();
    // Small n: the explicit inverse is cheaper than any estimator is clever.
    const CMatrix inv = solve(CMatrix::identity(n));
    return anorm_ * inv.norm_one();
}

CMatrix solve(const CMatrix& a, const CMatrix& rhs)
{
    LuFactor lu(a);
    if (lu.singular())
        throw NumericError("solve: singular matrix\n" + a.to_string());
    return lu.solve(rhs);
}

CMatrix inverse(const CMatrix& a)
{
    return solve(a, CMatrix::identity(a.rows()));
}

CMatrix resolvent_solve(const CMatrix& m, double omega, const CMatrix& rhs)
{
    CMatrix shifted = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        shifted(i, i) -= cplx(0.0, omega);
    LuFactor lu(shifted);
    const double cond = lu.condition_estimate();
    if (!(cond < 1e12)) {
        std::ostringstream os;
        os << "resolvent_solve: M - i*omega*I ill-conditioned (cond ~ " << cond << ") at omega = " << omega
           << " rad/s";
        throw NumericError(os.str());
    }
    return lu.solve(rhs);
}

// ---------------------------------------------------------------- eigenvalues

namespace {

// Householder reduction to upper Hessenberg form, in place.
void to_hessenberg(CMatrix& h)
{
    const std::size_t n = h.rows();
    if (n < 3)
        return;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0)
            continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
        const cplx alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), cplx{});
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i)
            v[i] = h(i, k);
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            vnorm += std::norm(v[i]);
        if (vnorm == 0.0)
            continue;
        // H <- (I - 2 v v^H / |v|^2) H (I - 2 v v^H / |v|^2)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i)
                s += std::conj(v[i]) * h(i, j);
            s *= 2.0 / vnorm;
            for (std::size_t i = k + 1; i < n; ++i)
                h(i, j) -= v[i] * s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j)
                s += h(i, j) * v[j];
            s *= 2.0 / vnorm;
            for (std::size_t j = k + 1; j < n; ++j)
                h(i, j) -= s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i)
            h(i, k) = 0.0;
    }
}

// Shifted QR on an upper Hessenberg matrix; returns eigenvalues.
std::vector<cplx> hessenberg_qr(CMatrix h)
{
    const std::size_t n = h.rows();
    std::vector<cplx> eig(n);
    if (n == 0)
        return eig;
    const double scale = std::max(h.norm_fro(), std::numeric_limits<double>::min());
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
    int iter = 0;
    int total = 0;
    const int max_total = 60 * static_cast<int>(n);
    std::vector<double> cs(n);
    std::vector<cplx> sn(n);

    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }
        std::ptrdiff_t l = hi;
        for (; l > 0; --l) {
            const double sub = std::abs(h(l, l - 1));
            double diag = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (diag == 0.0)
                diag = scale;
            if (sub <= kEps * diag) {
                h(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            eig[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++total > max_total)
            throw NumericError("eigenvalues_qr: QR iteration did not converge");
        ++iter;

        cplx mu;
        if (iter % 11 == 10) {
            // exceptional shift to break cycles
            const double sub = std::abs(h(hi, hi - 1));
            mu = h(hi, hi) + cplx(0.75 * sub, 0.5 * sub);
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx half = 0.5 * (a - d);
            const cplx disc = std::sqrt(half * half + b * c);
            const cplx m1 = 0.5 * (a + d) + disc;
            const cplx m2 = 0.5 * (a + d) - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }

        for (std::ptrdiff_t k = l; k <= hi; ++k)
            h(k, k) -= mu;
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const cplx a = h(k, k);
            const cplx b = h(k + 1, k);
            const double r = std::hypot(std::abs(a), std::abs(b));
            double c;
            cplx s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (std::abs(a) == 0.0) {
                c = 0.0;
                s = 1.0;
            } else {
                c = std::abs(a) / r;
                s = (a / std::abs(a)) * std::conj(b) / r;
            }
            cs[k] = c;
            sn[k] = s;
            for (std::ptrdiff_t j = k; j <= hi; ++j) {
                const cplx x = h(k, j), y = h(k + 1, j);
                h(k, j) = c * x + s * y;
                h(k + 1, j) = -std::conj(s) * x + c * y;
            }
        }
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const double c = cs[k];
            const cplx s = sn[k];
            const std::ptrdiff_t top = std::min(k + 2, hi);
            for (std::ptrdiff_t i = l; i <= top; ++i) {
                const cplx x = h(i, k), y = h(i, k + 1);
                h(i, k) = c * x + std::conj(s) * y;
                h(i, k + 1) = -s * x + c * y;
            }
        }
        for (std::ptrdiff_t k = l; k <= hi; ++k)
            h(k, k) += mu;
    }
    return eig;
}

CMatrix companion(std::span<const cplx> monic)
{
    // monic = [1, a1, ..., an]; Hessenberg companion with -a in the first row.
    const std::size_t n = monic.size() - 1;
    CMatrix c(n, n);
    for (std::size_t j = 0; j < n; ++j)
        c(0, j) = -monic[j + 1];
    for (std::size_t i = 1; i < n; ++i)
        c(i, i - 1) = 1.0;
    return c;
}

std::vector<cplx> inverse_iteration(const CMatrix& m, cplx lambda)
{
    const std::size_t n = m.rows();
    const double mnorm = std::max(m.norm_fro(), std::numeric_limits<double>::min());
    CMatrix a = m;
    const cplx shift = lambda + cplx(mnorm * 1e-13, mnorm * 1e-13);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) -= shift;
    LuFactor lu(a);
    std::vector<cplx> v(n, cplx(1.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        v[i] += 0.01 * static_cast<double>(i);
    if (lu.singular()) {
        // exact eigenvalue hit; perturb harder
        for (std::size_t i = 0; i < n; ++i)
            a(i, i) -= mnorm * 1e-10;
        LuFactor lu2(a);
        for (int it = 0; it < 3; ++it) {
            v = lu2.solve(std::span<const cplx>(v));
            double nv = 0.0;
            for (auto& z : v)
                nv += std::norm(z);
            nv = std::sqrt(nv);
            for (auto& z : v)
                z /= nv;
        }
        return v;
    }
    for (int it = 0; it < 3; ++it) {
        v = lu.solve(std::span<const cplx>(v));
        double nv = 0.0;
        for (auto& z : v)
            nv += std::norm(z);
        nv = std::sqrt(nv);
        if (!(nv > 0.0) || !std::isfinite(nv))
            break;
        for (auto& z : v)
            z /= nv;
    }
    return v;
}

} // namespace

std::vector<cplx> eigenvalues_qr(const CMatrix& m)
{
    if (!m.square())
        throw std::invalid_argument("eigenvalues_qr: matrix not square");
    if (!m.all_finite())
        throw NumericError("eigenvalues_qr: non-finite entries\n" + m.to_string());
    CMatrix h = m;
    to_hessenberg(h);
    return hessenberg_qr(std::move(h));
}

std::vector<cplx> characteristic_polynomial(const CMatrix& m)
{
    if (!m.square())
        throw std::invalid_argument("characteristic_polynomial: matrix not square");
    const std::size_t n = m.rows();
    const double s = std::max(m.norm_fro(), std::numeric_limits<double>::min());
    CMatrix a = m;
    a *= 1.0 / s;
    // Faddeev-LeVerrier on the scaled matrix, then undo the scaling.
    std::vector<cplx> c(n + 1);
    c[0] = 1.0;
    CMatrix mk(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        CMatrix next = a * mk;
        for (std::size_t i = 0; i < n; ++i)
            next(i, i) += c[k - 1];
        mk = std::move(next);
        c[k] = -(a * mk).trace() / static_cast<double>(k);
    }
    double sk = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        sk *= s;
        c[k] *= sk;
    }
    return c;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs)
{
    std::size_t first = 0;
    while (first < coeffs.size() && coeffs[first] == cplx{})
        ++first;
    if (first + 1 >= coeffs.size())
        return {};
    std::vector<cplx> monic(coeffs.begin() + static_cast<std::ptrdiff_t>(first), coeffs.end());
    const cplx lead = monic[0];
    for (auto& z : monic)
        z /= lead;
    if (monic.size() == 2)
        return {-monic[1]};
    return hessenberg_qr(companion(monic));
}

std::vector<cplx> eigenvalues_companion(const CMatrix& m)
{
    const auto p = characteristic_polynomial(m);
    return polynomial_roots(p);
}

std::vector<cplx> eigenvalues(const CMatrix& m)
{
    if (!m.square() || m.rows() == 0)
        throw std::invalid_argument("eigenvalues: need a non-empty square matrix");
    try {
        return eigenvalues_qr(m);
    } catch (const NumericError&) {
        return eigenvalues_companion(m);
    }
}

EigenSet eigendecompose(const CMatrix& m)
{
    if (!m.square() || m.rows() == 0)
        throw std::invalid_argument("eigendecompose: need a non-empty square matrix");
    const std::size_t n = m.rows();
    EigenSet out;
    out.values = eigenvalues(m);
    const double mnorm = std::max(m.norm_fro(), std::numeric_limits<double>::min());
    out.vectors = CMatrix(n, n);
    out.residuals.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto v = inverse_iteration(m, out.values[k]);
        const auto mv = m * std::span<const cplx>(v);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v[i];
            r += std::norm(mv[i] - out.values[k] * v[i]);
        }
        out.residuals[k] = std::sqrt(r) / mnorm;
    }
    const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
    if (!(worst < 1e-9)) {
        std::ostringstream os;
        os << "eigendecompose: residual " << worst << " above 1e-9\n" << m.to_string();
        throw NumericError(os.str());
    }
    return out;
}

// ---------------------------------------------------------------- branches

std::vector<std::size_t> match_nearest(std::span<const cplx> refs, std::span<const cplx> values, bool* tie)
{
    const std::size_t n = refs.size();
    if (values.size() != n)
        throw std::invalid_argument("match_nearest: size mismatch");
    std::vector<std::size_t> assign(n, n);
    std::vector<bool> ref_used(n, false), val_used(n, false);
    double scale = 0.0;
    for (const auto& z : values)
        scale = std::max(scale, std::abs(z));
    const double tie_tol = 1e-12 * std::max(scale, 1.0);

    for (std::size_t round = 0; round < n; ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bj = n, bk = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (ref_used[j])
                continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (val_used[k])
                    continue;
                const double d = std::abs(refs[j] - values[k]);
                if (d < best) {
                    best = d;
                    bj = j;
                    bk = k;
                }
            }
        }
        if (tie) {
            for (std::size_t j = 0; j < n; ++j) {
                if (ref_used[j])
                    continue;
                for (std::size_t k = 0; k < n; ++k) {
                    if (val_used[k] || (j == bj && k == bk))
                        continue;
                    if ((j == bj) != (k == bk) && std::abs(std::abs(refs[j] - values[k]) - best) <= tie_tol)
                        *tie = true;
                }
            }
        }
        ref_used[bj] = true;
        val_used[bk] = true;
        assign[bj] = bk;
    }
    return assign;
}

BranchTracks track_branches(std::span<const std::vector<cplx>> sweep, std::span<const cplx> anchors)
{
    if (sweep.empty())
        throw std::invalid_argument("track_branches: empty sweep");
    const std::size_t n = anchors.size();
    BranchTracks out;
    out.branches.assign(n, std::vector<cplx>(sweep.size()));
    std::vector<cplx> prev(anchors.begin(), anchors.end());
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        if (sweep[k].size() != n)
            throw std::invalid_argument("track_branches: inconsistent eigenvalue count");
        const auto assign = match_nearest(prev, sweep[k], &out.tie);
        for (std::size_t j = 0; j < n; ++j) {
            out.branches[j][k] = sweep[k][assign[j]];
            prev[j] = out.branches[j][k];
        }
    }
    return out;
}

} // namespace omx
