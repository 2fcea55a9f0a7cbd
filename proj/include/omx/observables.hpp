/**
 * @file observables.hpp
 * @brief Resonance shifts from eigenvalues, spring effect, side-band
 *        inequivalence and the phonon-from-slope estimator.
 *
 * Eigenvalues of the SecondOrder3 matrix are written eig = i (Delta + eta).
 * Without coupling eta takes the values i kappa/2, -Omega + i gamma/2 and
 * Omega + i gamma/2, which serve as tracking anchors.
 */
#pragma once

#include "omx/params.hpp"
#include "omx/steady.hpp"

#include <array>
#include <functional>

namespace omx {

enum class PhononSource {
    Coherent, // mbar from the steady state
    Thermal   // Bose occupancy at p.T replaces mbar
};

struct ShiftReport {
    double dOmega = 0.0;
    double domega = 0.0;
    double dGamma = 0.0;
    double dkappa = 0.0;
    bool tie = false; // branch tracking met an ambiguous assignment
    std::array<cplx, 3> eta{};
};

ShiftReport resonance_shifts(const OmParams& p, const SteadyState& ss, PhononSource src = PhononSource::Coherent);

struct ShiftSums {
    double freq = 0.0;  // dOmega + domega
    double decay = 0.0; // dGamma + dkappa
};

ShiftSums approx_shift(const OmParams& p, double nbar);

struct SpringPoint {
    double w = 0.0;
    double Delta = 0.0;
    double dOmega_corr = 0.0;
    double dGamma_corr = 0.0;
    double dOmega_std = 0.0;
    double dGamma_std = 0.0;
};

// Full spring effect at probe frequency w (w != 0, std::domain_error
// otherwise) using ss.nbar and ss.mbar.
SpringPoint spring_corrected(const OmParams& p, const SteadyState& ss, double w, double Delta);

struct MuTerms {
    double re = 0.0;
    double im = 0.0;
};

MuTerms spring_mu(const OmParams& p, double w, double mbar);

struct WeakSpring {
    double dOmega = 0.0;   // 2 Delta g0^2 (n + m + 1) / (Delta^2 + kappa^2/4)
    double g2_term = 0.0;  // leading order in the drive
    double g4_term = 0.0;  // coherent-phonon correction
};

WeakSpring spring_weak_coupling(const OmParams& p, const SteadyState& ss, double Delta);

// Central difference of f at x0 with step h.
double central_slope(const std::function<double(double)>& f, double x0, double h);

// d(dOmega)/dDelta at Delta = 0 for the weak-coupling formula, the steady
// state re-solved at each detuning; step kappa/200 unless given.
double weak_spring_slope(const OmParams& p, double alpha_mag, double h = 0.0);

struct SlopeEstimate {
    double mbar0 = 0.0;      // from the measured slope
    double nbar_form = 0.0;  // 32 (g0 Qm nbar0 / Gamma)^2 with nbar0 = 4|alpha|^2/kappa^2
    double alpha_form = 0.0; // 512 g0^2 Qm^2 |alpha|^4 / (Gamma^2 kappa^4)
};

SlopeEstimate phonons_from_spring_slope(const OmParams& p, double slope, double alpha_mag);

struct Inequivalence {
    double dDelta = 0.0;  // (Delta_r + Delta_b)/2 with the sign of the expansion
    double Delta_r = 0.0; // red sideband displacement
    double Delta_b = 0.0; // blue sideband displacement
    bool tie = false;
};

// Eigenvalue-based inequivalence at the state's detuning, s = 0.
Inequivalence sideband_inequivalence_numeric(const OmParams& p, const SteadyState& ss);

struct InequivalenceSeries {
    double first = 0.0;  // first-order sidebands, rad/s
    double second = 0.0; // second-order sidebands
};

InequivalenceSeries sideband_inequivalence_asymptotic(const OmParams& p, double nbar, double mbar);

// |Delta_r + Delta_b| > Gamma from the asymptotic series.
bool inequivalence_observable(const OmParams& p, double nbar, double mbar);

} // namespace omx
