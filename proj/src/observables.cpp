#include "omx/observables.hpp"

#include "omx/errors.hpp"
#include "omx/formalisms.hpp"

#include <cmath>
#include <stdexcept>

namespace omx {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr int ramp_points = 24;

// Eigen-displacements eta of the s = 0 SecondOrder3 matrix, tracked from
// g0 = 0 up to the actual coupling so that strong hybridisation keeps the
// anchor identity.
std::array<cplx, 3> tracked_eta(const OmParams& p, const SteadyState& ss, bool* tie)
{
    const std::vector<cplx> anchors{0.5 * I * p.kappa, cplx(-p.Omega, 0.5 * p.gamma()), cplx(p.Omega, 0.5 * p.gamma())};
    std::vector<std::vector<cplx>> sweep;
    sweep.reserve(ramp_points + 1);
    for (int k = 0; k <= ramp_points; ++k) {
        const double scale = static_cast<double>(k) / ramp_points;
        const auto sys = build_system(Formalism::SecondOrder3, p.with_g0(scale * p.g0), ss, {.include_s = false});
        auto ev = eigenvalues(sys.M);
        for (auto& e : ev)
            e = -I * e - ss.Delta;
        sweep.push_back(std::move(ev));
    }
    const auto tracks = track_branches(sweep, anchors);
    if (tie)
        *tie = tracks.tie;
    return {tracks.branches[0].back(), tracks.branches[1].back(), tracks.branches[2].back()};
}

double lorentz_sum(double Delta, double w, double k)
{
    const double q = 0.25 * k * k;
    return (Delta + w) / ((Delta + w) * (Delta + w) + q) + (Delta - w) / ((Delta - w) * (Delta - w) + q);
}

double lorentz_diff(double Delta, double w, double k)
{
    const double q = 0.25 * k * k;
    return k / ((Delta + w) * (Delta + w) + q) - k / ((Delta - w) * (Delta - w) + q);
}

} // namespace

ShiftReport resonance_shifts(const OmParams& p, const SteadyState& ss, PhononSource src)
{
    SteadyState s = ss;
    if (src == PhononSource::Thermal)
        s.mbar = thermal_occupancy(p.Omega, p.T);
    ShiftReport r;
    r.eta = tracked_eta(p, s, &r.tie);
    const auto& e = r.eta;
    r.dOmega = -0.5 * (e[1] - e[2]).real() - p.Omega;
    r.domega = -0.5 * (e[1] + e[2]).real();
    r.dGamma = (-2.0 * e[0] + e[1] + e[2]).imag() - p.Gamma;
    r.dkappa = 2.0 * e[0].imag() - p.kappa;
    return r;
}

ShiftSums approx_shift(const OmParams& p, double nbar)
{
    const double g2 = p.g0 * p.g0 * nbar;
    const double den = p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma;
    return {-g2 * p.Omega / den, g2 * p.Gamma / (2.0 * den)};
}

MuTerms spring_mu(const OmParams& p, double w, double mbar)
{
    return {w / p.Omega * (mbar + 0.5) + 0.5, p.Gamma / (2.0 * p.Omega) * (mbar + 0.5)};
}

SpringPoint spring_corrected(const OmParams& p, const SteadyState& ss, double w, double Delta)
{
    if (w == 0.0)
        throw std::domain_error("spring_corrected: probe frequency must be non-zero");
    const double pre = p.g0 * p.g0 * p.Omega / w;
    const double A = lorentz_sum(Delta, w, p.kappa);
    const double B = lorentz_diff(Delta, w, p.kappa);
    const auto mu = spring_mu(p, w, ss.mbar);

    SpringPoint s;
    s.w = w;
    s.Delta = Delta;
    s.dOmega_std = pre * ss.nbar * A;
    s.dGamma_std = pre * ss.nbar * B;
    s.dOmega_corr = s.dOmega_std + pre * mu.re * A + pre * mu.im * B;
    s.dGamma_corr = s.dGamma_std + pre * mu.re * B - pre * mu.im * A;
    return s;
}

WeakSpring spring_weak_coupling(const OmParams& p, const SteadyState& ss, double Delta)
{
    const double g2 = p.g0 * p.g0;
    const double L = Delta * Delta + 0.25 * p.kappa * p.kappa;
    const double a2 = std::norm(ss.alpha);
    WeakSpring r;
    r.dOmega = 2.0 * Delta * g2 * (ss.nbar + ss.mbar + 1.0) / L;
    r.g2_term = g2 * 2.0 * Delta * a2 / (L * L);
    if (ss.nbar > 0.0 && p.g0 > 0.0) {
        const double zeta = coherent_phonons(p, Delta, ss.nbar).approx / (g2 * ss.nbar * ss.nbar);
        r.g4_term = g2 * g2 * 2.0 * Delta * zeta * a2 * a2 / (L * L * L);
    }
    return r;
}

double central_slope(const std::function<double(double)>& f, double x0, double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("central_slope: step must be positive");
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

double weak_spring_slope(const OmParams& p, double alpha_mag, double h)
{
    if (h <= 0.0)
        h = p.kappa / 200.0;
    return central_slope(
        [&](double D) { return spring_weak_coupling(p, steady_state(p, D, alpha_mag), D).dOmega; }, 0.0, h);
}

SlopeEstimate phonons_from_spring_slope(const OmParams& p, double slope, double alpha_mag)
{
    if (!(p.g0 > 0.0))
        throw std::domain_error("phonons_from_spring_slope: needs g0 > 0");
    const double k2 = p.kappa * p.kappa;
    const double a2 = alpha_mag * alpha_mag;
    const double Qm = p.Omega / p.Gamma;
    const double n0 = 4.0 * a2 / k2;
    SlopeEstimate e;
    e.mbar0 = k2 / (8.0 * p.g0 * p.g0) * slope - n0 - 1.0;
    const double r = p.g0 * Qm * n0 / p.Gamma;
    e.nbar_form = 32.0 * r * r;
    e.alpha_form = 512.0 * p.g0 * p.g0 * Qm * Qm * a2 * a2 / (p.Gamma * p.Gamma * k2 * k2);
    return e;
}

Inequivalence sideband_inequivalence_numeric(const OmParams& p, const SteadyState& ss)
{
    Inequivalence r;
    const auto e = tracked_eta(p, ss, &r.tie);
    r.Delta_b = e[1].real() + p.Omega;
    r.Delta_r = e[2].real() - p.Omega;
    r.dDelta = -0.5 * (r.Delta_r + r.Delta_b);
    return r;
}

InequivalenceSeries sideband_inequivalence_asymptotic(const OmParams& p, double nbar, double mbar)
{
    const double x = p.g0 / p.Omega;
    const double x2 = x * x;
    InequivalenceSeries s;
    s.first = p.Omega * (x2 * (nbar + 0.5) - 2.0 * x2 * x2 * (nbar + 0.5) * (mbar + 0.5));
    s.second = -2.0 * s.first;
    return s;
}

bool inequivalence_observable(const OmParams& p, double nbar, double mbar)
{
    return 2.0 * std::abs(sideband_inequivalence_asymptotic(p, nbar, mbar).first) > p.Gamma;
}

} // namespace omx
