#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "omx/errors.hpp"
#include "omx/formalisms.hpp"
#include "omx/linalg.hpp"
#include "omx/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>

using namespace omx;

namespace {

CMatrix random_matrix(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = {d(rng), d(rng)};
    return m;
}

Eigen::MatrixXcd to_eigen(const CMatrix& m)
{
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return e;
}

// Largest distance from each value to its partner under the best pairing
// (brute force over permutations; n <= 6).
double set_distance(std::vector<cplx> a, std::vector<cplx> b)
{
    REQUIRE(a.size() == b.size());
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

TEST_CASE("matrix basics")
{
    const CMatrix a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(a.transpose()(0, 1) == cplx(3.0));
    CHECK(a.trace() == cplx(5.0));
    CHECK((a * CMatrix::identity(2)).data()[3] == cplx(4.0));
    CHECK((a - a).norm_fro() == 0.0);
    CHECK(a.norm_one() == 6.0);
    CHECK(a.block(1, 0, 1, 2)(0, 1) == cplx(4.0));
    CHECK(a.all_finite());
}

TEST_CASE("LU solve and inverse against Eigen")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = random_matrix(6, rng);
        const CMatrix rhs = random_matrix(6, rng);
        const CMatrix x = solve(m, rhs);
        const Eigen::MatrixXcd ex = to_eigen(m).partialPivLu().solve(to_eigen(rhs));
        CHECK((to_eigen(x) - ex).norm() / ex.norm() < 1e-12);
        CHECK(((m * inverse(m)) - CMatrix::identity(6)).norm_fro() < 1e-12);
    }
    const CMatrix singular{{1.0, 2.0}, {2.0, 4.0}};
    CHECK(LuFactor(singular).singular());
}

TEST_CASE("resolvent solve")
{
    CMatrix minus_i = CMatrix::identity(3);
    minus_i *= -1.0;
    const CMatrix x = resolvent_solve(minus_i, 0.0, CMatrix::identity(3));
    CHECK((x - minus_i).norm_fro() < 1e-15);

    std::mt19937_64 rng(11);
    for (double omega : {-3.0, 0.0, 0.7, 12.0}) {
        const CMatrix m = random_matrix(5, rng);
        const CMatrix rhs = random_matrix(5, rng);
        const CMatrix sol = resolvent_solve(m, omega, rhs);
        CMatrix shifted = m;
        for (std::size_t i = 0; i < 5; ++i)
            shifted(i, i) -= cplx(0.0, omega);
        CHECK((shifted * sol - rhs).norm_fro() < 1e-10);
    }

    // A pole on the real frequency axis is reported, not returned.
    const CMatrix pole{{cplx(0.0, 2.0)}};
    CHECK_THROWS_AS(resolvent_solve(pole, 2.0, CMatrix::identity(1)), NumericError);
}

TEST_CASE("resolvent reproduces the closed-form scattering row at the cavity frequency")
{
    const OmParams p = omx::testing::fixture("C");
    const SteadyState ss = steady_state(p, -p.Omega);
    const CoeffSystem sys = build_system(Formalism::SecondOrder3, p, ss, {.include_s = false});
    const CMatrix y = scattering_matrix(sys, ss.Delta);
    const auto row = closed_form_y_row(p, ss, ss.Delta);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(y(0, j) - row[j]) <= 1e-9 * std::abs(row[j]));
}

TEST_CASE("eigenvalues")
{
    SUBCASE("diagonal matrices are returned exactly")
    {
        const std::vector<cplx> d{{-1.0, 2.0}, {0.5, 0.0}, {3.0, -7.0}, {0.0, 0.0}};
        const auto ev = eigendecompose(CMatrix::diagonal(d)).values;
        CHECK(set_distance(ev, d) == 0.0);
    }
    SUBCASE("random 6x6 against Eigen and the companion oracle")
    {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 50; ++trial) {
            const CMatrix m = random_matrix(6, rng);
            const EigenSet es = eigendecompose(m);
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(to_eigen(m));
            std::vector<cplx> want(ref.eigenvalues().data(), ref.eigenvalues().data() + 6);
            const double scale = m.norm_fro();
            CHECK(set_distance(es.values, want) < 1e-10 * scale);
            CHECK(set_distance(eigenvalues_companion(m), want) < 1e-8 * scale);
            for (double r : es.residuals)
                CHECK(r < 1e-12);
        }
    }
    SUBCASE("eigenvectors satisfy M v = lambda v")
    {
        std::mt19937_64 rng(5);
        const CMatrix m = random_matrix(5, rng);
        const EigenSet es = eigendecompose(m);
        for (std::size_t k = 0; k < 5; ++k) {
            const auto v = es.vectors.column(k);
            const auto mv = m * std::span<const cplx>(v);
            for (std::size_t i = 0; i < 5; ++i)
                CHECK(std::abs(mv[i] - es.values[k] * v[i]) < 1e-10 * m.norm_fro());
        }
    }
    SUBCASE("decoupled SecondOrder3")
    {
        OmParams p = omx::testing::fixture("C").with_g0(0.0);
        const double D = -0.3 * p.Omega;
        const SteadyState ss = steady_state(p, D, 1e6);
        const auto ev = eigendecompose(build_system(Formalism::SecondOrder3, p, ss).M).values;
        const cplx I{0.0, 1.0};
        const std::vector<cplx> want{I * D - 0.5 * p.kappa, -I * (p.Omega - D) - 0.5 * p.gamma(),
                                     I * (p.Omega + D) - 0.5 * p.gamma()};
        CHECK(set_distance(ev, want) < 1e-12 * p.Omega);
    }
}

TEST_CASE("characteristic polynomial and polynomial roots")
{
    const CMatrix m{{2.0, 1.0}, {0.0, 3.0}};
    const auto c = characteristic_polynomial(m);
    REQUIRE(c.size() == 3);
    CHECK(std::abs(c[0] - 1.0) < 1e-15);
    CHECK(std::abs(c[1] + 5.0) < 1e-14);
    CHECK(std::abs(c[2] - 6.0) < 1e-14);

    const std::vector<cplx> cubic{2.0, -12.0, 22.0, -12.0}; // 2 (z-1)(z-2)(z-3)
    CHECK(set_distance(polynomial_roots(cubic), {1.0, 2.0, 3.0}) < 1e-12);
}

TEST_CASE("branch tracking")
{
    SUBCASE("constant sweep")
    {
        const std::vector<cplx> v{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
        const std::vector<std::vector<cplx>> sweep(5, v);
        const auto t = track_branches(sweep, v);
        for (std::size_t j = 0; j < 3; ++j)
            for (const auto& x : t.branches[j])
                CHECK(x == v[j]);
        CHECK_FALSE(t.tie);
    }
    SUBCASE("decoupled eta stays on its anchor across a detuning sweep")
    {
        OmParams p = omx::testing::fixture("C").with_g0(0.0);
        const cplx I{0.0, 1.0};
        const std::vector<cplx> anchors{I * 0.5 * p.kappa, -p.Omega + I * 0.5 * p.gamma(), p.Omega + I * 0.5 * p.gamma()};
        std::vector<std::vector<cplx>> sweep;
        for (int k = 0; k < 11; ++k) {
            const double D = p.Omega * (-1.0 + 0.2 * k);
            auto ev = eigendecompose(build_system(Formalism::SecondOrder3, p, steady_state(p, D, 1e6)).M).values;
            for (auto& e : ev)
                e = -I * e - D;
            std::reverse(ev.begin(), ev.end()); // order must not matter
            sweep.push_back(ev);
        }
        const auto t = track_branches(sweep, anchors);
        for (std::size_t j = 0; j < 3; ++j)
            for (const auto& x : t.branches[j])
                CHECK(std::abs(x - anchors[j]) < 1e-9 * p.Omega);
    }
    SUBCASE("avoided crossing is not swapped; exhaustive assignment agrees")
    {
        // Two levels +-sqrt(x^2 + c^2) repel near x = 0; a third sits apart.
        const double c = 0.05;
        std::vector<std::vector<cplx>> sweep;
        for (int k = 0; k < 5; ++k) {
            const double x = -0.2 + 0.1 * k;
            const double r = std::sqrt(x * x + c * c);
            sweep.push_back({cplx(5.0, 0.0), cplx(-r, 0.01), cplx(r, 0.01)});
        }
        const std::vector<cplx> anchors{cplx(-0.2, 0.0), cplx(0.2, 0.0), cplx(5.0, 0.0)};
        const auto t = track_branches(sweep, anchors);

        // Oracle: over all 3!^4 assignments of later points, minimise total step length.
        std::vector<std::size_t> first = match_nearest(anchors, sweep[0]);
        std::vector<std::vector<std::size_t>> perms;
        std::vector<std::size_t> base{0, 1, 2};
        do
            perms.push_back(base);
        while (std::next_permutation(base.begin(), base.end()));
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::vector<std::size_t>> best_path;
        std::vector<std::size_t> idx(4, 0);
        for (std::size_t code = 0; code < 6 * 6 * 6 * 6; ++code) {
            std::size_t cc = code;
            for (auto& v : idx) {
                v = cc % 6;
                cc /= 6;
            }
            double total = 0.0;
            std::vector<std::vector<std::size_t>> path{first};
            for (std::size_t s = 0; s < 4; ++s) {
                std::vector<std::size_t> next(3);
                for (std::size_t j = 0; j < 3; ++j) {
                    next[j] = perms[idx[s]][path.back()[j]];
                    total += std::abs(sweep[s + 1][next[j]] - sweep[s][path.back()[j]]);
                }
                path.push_back(next);
            }
            if (total < best) {
                best = total;
                best_path = path;
            }
        }
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t s = 0; s < 5; ++s)
                CHECK(t.branches[j][s] == sweep[s][best_path[s][j]]);
        // The lower level stays negative throughout.
        for (const auto& x : t.branches[0])
            CHECK(x.real() < 0.0);
    }
}
