#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "omx/errors.hpp"
#include "omx/steady.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>

using namespace omx;
using omx::testing::fixture;
using omx::testing::rel_err;

namespace {

// Real non-negative roots of the cubic from Eigen's companion solver.
std::vector<double> oracle_roots(const OmParams& p, double Delta, double alpha_mag)
{
    const auto c = intracavity_cubic(p, Delta, alpha_mag);
    Eigen::Vector4d coeffs(c[3], c[2], c[1], c[0]); // Eigen wants ascending order
    Eigen::PolynomialSolver<double, 3> solver(coeffs);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        const auto r = solver.roots()[i];
        if (std::abs(r.imag()) <= 1e-7 * std::abs(r) && r.real() >= 0.0)
            out.push_back(r.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("decoupled and undriven limits")
{
    const OmParams p = fixture("A");
    const double alpha = drive_amplitude(p);
    const auto lorentz = solve_intracavity(p.with_g0(0.0), 0.0, alpha);
    REQUIRE(lorentz.size() == 1);
    CHECK(rel_err(lorentz[0], 4.0 * alpha * alpha / (p.kappa * p.kappa)) < 1e-14);

    const auto none = solve_intracavity(p, 0.3 * p.kappa, 0.0);
    REQUIRE(none.size() == 1);
    CHECK(none[0] == 0.0);
}

TEST_CASE("cubic roots match the Eigen polynomial solver")
{
    SUBCASE("system A on resonance")
    {
        const OmParams p = fixture("A");
        const double alpha = drive_amplitude(p);
        const auto got = solve_intracavity(p, 0.0, alpha);
        const auto want = oracle_roots(p, 0.0, alpha);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(rel_err(got[i], want[i]) < 1e-10);
    }
    SUBCASE("polaron inside the bistable wedge")
    {
        const OmParams p = fixture("polaron");
        const double alpha = drive_amplitude(p, 1e-3);
        const auto got = solve_intracavity(p, -10.0 * p.kappa, alpha);
        const auto want = oracle_roots(p, -10.0 * p.kappa, alpha);
        REQUIRE(got.size() == 3);
        REQUIRE(want.size() == 3);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(rel_err(got[i], want[i]) < 1e-10);
        // No bistability on the blue side.
        CHECK(solve_intracavity(p, 3.0 * p.kappa, alpha).size() == 1);
    }
}

TEST_CASE("bistability onset")
{
    const OmParams p = fixture("polaron");
    const double alpha = drive_amplitude(p, 1e-4);
    CHECK_FALSE(bistability_onset(p.with_g0(0.0), alpha).has_value());
    CHECK_FALSE(bistability_onset(p, 0.0).has_value());

    SUBCASE("root of the defining cubic in Delta")
    {
        const double D = *bistability_onset(p, alpha);
        const double K = kerr_coefficient(p);
        const double lhs = -D * (D * D + 2.25 * p.kappa * p.kappa);
        const double rhs = 13.5 * K * alpha * alpha;
        CHECK(D < 0.0);
        CHECK(rel_err(lhs, rhs) < 1e-12);
        // Equivalently, the cubic's inflection point lies on the drive line.
        const double n_i = -2.0 * D / (3.0 * K);
        const auto c = intracavity_cubic(p, D, alpha);
        const double f = ((c[0] * n_i + c[1]) * n_i + c[2]) * n_i;
        CHECK(rel_err(f, alpha * alpha) < 1e-10);
    }
    SUBCASE("vanishing coupling pushes the onset to zero")
    {
        double prev = -std::numeric_limits<double>::infinity();
        for (double scale : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) {
            const double D = *bistability_onset(p.with_g0(p.g0 * scale), alpha);
            CHECK(D < 0.0);
            CHECK(D > prev);
            prev = D;
        }
        CHECK(std::abs(prev) < 1e-6 * p.kappa);
    }
    SUBCASE("stronger drive deepens the onset")
    {
        double prev = 0.0;
        for (double factor : {1.0, 8.0, 64.0, 512.0}) {
            const double D = *bistability_onset(p, alpha * std::sqrt(factor));
            CHECK(D < prev);
            prev = D;
        }
        const auto c1 = intracavity_cubic(p, -p.kappa, alpha);
        const auto c8 = intracavity_cubic(p, -p.kappa, alpha * std::sqrt(8.0));
        CHECK(rel_err(c8[3], 8.0 * c1[3]) < 1e-14);
    }
}

TEST_CASE("coherent phonons")
{
    const OmParams p = fixture("A");
    const OmParams off = p.with_g0(0.0);
    SUBCASE("decoupled limits")
    {
        CHECK(coherent_phonons(off, 1e9 * p.gamma(), 1e4).full < 1e-9);
        const auto at_zero = coherent_phonons(off, 0.0, 1e4);
        CHECK(at_zero.full == 0.0);
        CHECK(at_zero.approx == 0.0);
    }
    SUBCASE("detuning term dies off far from resonance")
    {
        for (double s : {-1.0, 1.0}) {
            const auto c = coherent_phonons(p, s * 1e6 * p.gamma(), 1e4);
            CHECK(rel_err(c.full, c.approx) < 1e-6);
        }
    }
    SUBCASE("lossless limit")
    {
        // gamma, Gamma << Omega at Delta = 0.
        OmParams q = fixture("C");
        const double n = 1e5;
        const double ref = 2.0 * q.g0 * q.g0 * n * n / (q.Omega * q.Omega);
        CHECK(rel_err(coherent_phonons(q, 0.0, n).approx, ref) < 0.1);
    }
    SUBCASE("quadratic in photon number")
    {
        for (double D : {-2.0 * p.Omega, 0.0, 0.7 * p.kappa}) {
            const double a = coherent_phonons(p, D, 1234.5).approx;
            const double b = coherent_phonons(p, D, 2469.0).approx;
            CHECK(std::abs(b / a - 4.0) < 1e-12);
        }
    }
    SUBCASE("full minus approx is the detuning term before the floor")
    {
        const double g = p.gamma();
        for (double D : {-10.0 * p.kappa, -0.1 * p.kappa, -1e-3 * p.kappa}) {
            const auto m = coherent_phonons(p, D, 1e5);
            const double term = -2.0 * D * p.Omega / (g * g + 4.0 * D * D);
            CHECK(rel_err(m.full - m.approx, term) < 1e-9);
        }
        // On the blue side the floor can engage.
        CHECK(coherent_phonons(p, 0.2 * p.kappa, 1.0).full == 0.0);
    }
}

TEST_CASE("steady state fields")
{
    SUBCASE("undriven")
    {
        const OmParams p = fixture("A");
        const SteadyState s = steady_state(p, 0.0, 0.0);
        CHECK(s.nbar == 0.0);
        CHECK(s.abar == 0.0);
        CHECK(s.bbar == cplx(0.0));
        CHECK(s.alpha == cplx(0.0));
        CHECK(s.ab_pair == cplx(0.0));
        CHECK(s.abdag_pair == cplx(0.0));
        CHECK(s.mbar == 0.0);
        CHECK(rel_err(s.m_th, thermal_occupancy(p.Omega, p.T)) < 1e-15);
    }
    SUBCASE("decoupled")
    {
        const OmParams p = fixture("A").with_g0(0.0);
        const double D = -0.4 * p.kappa;
        const SteadyState s = steady_state(p, D);
        CHECK(s.ab_pair == cplx(0.0));
        CHECK(std::abs(s.alpha - s.abar * cplx(-0.5 * p.kappa, D)) < 1e-12 * std::abs(s.alpha));
        CHECK(rel_err(std::abs(s.alpha), drive_amplitude(p)) < 1e-12);
    }
    SUBCASE("mean-field factorisation in the Doppler regime")
    {
        const OmParams p = fixture("A");
        const SteadyState s = steady_state(p, 0.0);
        const cplx mf = s.abar * s.bbar;
        CHECK(std::abs(s.ab_pair - mf) / std::abs(mf) < 1e-3);
    }
    SUBCASE("mechanical amplitude and drive consistency")
    {
        const OmParams p = fixture("B");
        const double D = -0.5 * p.Omega;
        const SteadyState s = steady_state(p, D);
        const cplx I{0.0, 1.0};
        CHECK(std::abs(s.bbar - I * p.g0 * s.nbar / (I * p.Omega + 0.5 * p.Gamma)) < 1e-12 * std::abs(s.bbar));
        CHECK(rel_err(std::abs(s.alpha), drive_amplitude(p)) < 1e-9);
        CHECK(s.branch_count == static_cast<int>(solve_intracavity(p, D, drive_amplitude(p)).size()));
    }
    SUBCASE("branch selection")
    {
        const OmParams p = fixture("polaron");
        const double alpha = drive_amplitude(p, 1e-3);
        const double D = -10.0 * p.kappa;
        const SteadyState lo = steady_state(p, D, alpha, BranchPolicy::lowest());
        const SteadyState hi = steady_state(p, D, alpha, BranchPolicy::highest());
        CHECK(lo.branch_count == 3);
        CHECK(lo.nbar < hi.nbar);
        CHECK(steady_state(p, D, alpha, BranchPolicy::index(2)).nbar == hi.nbar);
        CHECK_THROWS_AS(steady_state(p, D, alpha, BranchPolicy::index(3)), ConfigError);
    }
}
