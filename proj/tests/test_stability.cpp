#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "omx/errors.hpp"
#include "omx/stability.hpp"

#include <algorithm>

using namespace omx;
using omx::testing::fixture;
using omx::testing::rel_err;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n)
{
    auto v = linspace(std::log10(a), std::log10(b), n);
    for (auto& x : v)
        x = std::pow(10.0, x);
    return v;
}

} // namespace

TEST_CASE("classification")
{
    SUBCASE("decoupled systems decay at the bare rates")
    {
        const OmParams p = fixture("polaron").with_g0(0.0);
        const SteadyState ss = steady_state(p, -p.Omega);
        for (auto tag : {Formalism::Linear3, Formalism::Linearized4, Formalism::SecondOrder3, Formalism::ThirdOrder5}) {
            const CoeffSystem sys = build_system(tag, p, ss);
            CHECK(classify(sys) == Stability::Stable);
            for (const auto& v : eigendecompose(sys.M).values) {
                const double re = v.real();
                const bool bare = std::abs(re + 0.5 * p.kappa) < 1e-9 * p.kappa ||
                                  std::abs(re + 0.5 * p.Gamma) < 1e-9 * p.kappa ||
                                  std::abs(re + 0.5 * p.gamma()) < 1e-9 * p.kappa ||
                                  std::abs(re + 0.5 * p.theta()) < 1e-9 * p.kappa;
                CHECK_MESSAGE(bare, formalism_name(tag) << " Re = " << re);
            }
        }
    }
    SUBCASE("one growing mode")
    {
        CoeffSystem sys;
        const std::vector<cplx> d{-1.0, -2.0, 1e-9};
        sys.M = CMatrix::diagonal(d);
        CHECK(classify(sys) == Stability::Unstable);
        CHECK(classify(sys, 1e-8) == Stability::Stable);
        CHECK(max_real_eigenvalue(sys) == 1e-9);
        CHECK(marginal(sys, 1.0));
        CHECK(std::string(stability_name(Stability::Unstable)) == "UNSTABLE");
    }
}

TEST_CASE("phase maps")
{
    const OmParams p = fixture("polaron");
    const auto deltas = linspace(-2.0 * p.Omega, 2.0 * p.Omega, 41);

    SUBCASE("zero power is stable everywhere")
    {
        const auto m = phase_map(p, deltas, {0.0, 1e-9}, {.threads = 2});
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            CHECK(m.nonlinear[m.index(i, 0)] == Stability::Stable);
            CHECK(m.linear[m.index(i, 0)] == Stability::Stable);
        }
    }
    SUBCASE("red side goes unstable well above threshold under ThirdOrder5")
    {
        const auto red = linspace(-2.0 * p.Omega, -0.05 * p.Omega, 40);
        const auto m = phase_map(p, red, {20e-3}, {.threads = 2});
        const auto unstable = std::count(m.nonlinear.begin(), m.nonlinear.end(), Stability::Unstable);
        CHECK(unstable > 0);
        CHECK(m.p_th_red == 20e-3);
        CHECK(std::isnan(m.p_th_blue));
    }
    SUBCASE("Linear3 ignores the pump")
    {
        const auto powers = logspace(1e-6, 1.0, 13);
        const auto m = phase_map(p, deltas, powers, {.nonlinear = Formalism::Linear3, .threads = 2});
        for (std::size_t i = 0; i < deltas.size(); ++i)
            for (std::size_t j = 1; j < powers.size(); ++j)
                CHECK(m.nonlinear[m.index(i, j)] == m.nonlinear[m.index(i, 0)]);
    }
    SUBCASE("result does not depend on the thread count")
    {
        const auto powers = logspace(1e-5, 1e-1, 9);
        const auto a = phase_map(p, deltas, powers, {.threads = 1});
        const auto b = phase_map(p, deltas, powers, {.threads = 3});
        CHECK(a.nonlinear == b.nonlinear);
        CHECK(a.linear == b.linear);
        CHECK(a.branch_count == b.branch_count);
        CHECK(a.nbar == b.nbar);
    }
    SUBCASE("grids must increase")
    {
        CHECK_THROWS_AS(phase_map(p, {1.0, 0.0}, {1e-3}), ConfigError);
        CHECK_THROWS_AS(phase_map(p, {0.0}, {1e-3, 1e-3}), ConfigError);
    }
}

TEST_CASE("Doppler cavity shows no dynamic instability")
{
    const OmParams p = fixture("A");
    const auto m = phase_map(p, linspace(-2.0 * p.kappa, 2.0 * p.kappa, 41), logspace(1e-5, 1.0, 21), {.threads = 2});
    CHECK(std::count(m.nonlinear.begin(), m.nonlinear.end(), Stability::Unstable) == 0);
    CHECK(std::count(m.nonlinear.begin(), m.nonlinear.end(), Stability::Failed) == 0);
    CHECK(std::isnan(m.n_cr_empirical));
}

TEST_CASE("critical photon number")
{
    const OmParams p = fixture("polaron");
    const auto a = critical_photon_number(p);
    const auto b = critical_photon_number(p.with_g0(2.0 * p.g0));
    CHECK(rel_err(b.n_cr, a.n_cr / 4.0) < 1e-14);
    CHECK(a.sideband_resolved);
    CHECK_FALSE(critical_photon_number(fixture("A")).sideband_resolved);
    CHECK(rel_err(critical_photon_number(p, CoopConvention::MainText).n_cr, 4.0 * a.n_cr) < 1e-14);
}
