/**
 * @file spectra.hpp
 * @brief Scattering matrix, output noise spectra and cavity reflectivity.
 *
 * Frequencies are angular and measured in the frame where the cavity
 * resonance sits at omega = Delta.
 */
#pragma once

#include "omx/formalisms.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace omx {

// Uniform grid start, start + step, ..., up to and including stop.
struct FrequencyGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    FrequencyGrid() = default;
    FrequencyGrid(double start_, double stop_, double step_); // throws ConfigError

    std::size_t size() const;
    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    std::vector<double> values() const;

    // "a:b:step" in Hz, converted to rad/s.
    static FrequencyGrid parse_hz(std::string_view text);
};

struct SpectrumResult {
    FrequencyGrid grid;
    std::vector<double> total;
    std::vector<double> cavity; // optical input terms
    std::vector<double> sb1;    // first-order sideband (mechanical) terms
    std::vector<double> sb2;    // second-order sideband terms
    // Bins outside |omega - Delta| <= Omega/2, where the quadrature of the
    // multiplicative terms is not trustworthy. Empty for additive spectra.
    std::vector<bool> flagged;
};

// Y = I - P^T (M - i omega I)^-1 P with P = sys.ports.
CMatrix scattering_matrix(const CoeffSystem& sys, double omega);

// First row of Y for SecondOrder3 with s = 0, as a rational function.
std::array<cplx, 3> closed_form_y_row(const OmParams& p, const SteadyState& ss, double omega);

struct FieldSpectra {
    cplx b;     // mechanical amplitude
    cplx a;     // optical amplitude
    cplx ab;    // <ab>
    cplx abdag; // <ab^dagger>
};

// Throws NumericError exactly on a pole.
FieldSpectra closed_form_fields(const OmParams& p, const SteadyState& ss, double omega);

// S = sum_j |Y_1j|^2 S_j with S_j = 1/2 on optical inputs and m + 1/2 on
// mechanical inputs.
SpectrumResult spectrum_additive(const CoeffSystem& sys, const FrequencyGrid& grid, double m);

// out[i] = sum_k kernel[i - k + f.size() - 1] * f[k] for i < n_out: a
// discrete convolution with the kernel sampled on the difference lattice.
std::vector<cplx> toeplitz_convolve(const std::vector<cplx>& kernel, const std::vector<cplx>& f, std::size_t n_out);

// Cavity term plus convolution sideband terms; sys must be SecondOrder3 or
// ThirdOrder5 (CapabilityError otherwise).
SpectrumResult spectrum_multiplicative(const CoeffSystem& sys, const OmParams& p, const SteadyState& ss,
                                       const FrequencyGrid& grid, double m);

// Reflection amplitude 2 - Y_11(omega). Y as defined above carries the
// active sign of the input-output relation in this matrix convention
// (1 + 2 eta on resonance); the passive sign mirrors Y_11 about 1 and
// reduces to the mean-field R at g0 = 0.
cplx reflection_amplitude(const CoeffSystem& sys, double omega);

struct Reflectivity {
    std::vector<double> semiclassical; // |R|^2 from the mean-field photon equation
    std::vector<double> scattering;    // |reflection_amplitude|^2 of the chosen formalism
};

Reflectivity reflectivity(const OmParams& p, const SteadyState& ss, const FrequencyGrid& grid,
                          Formalism tag = Formalism::ThirdOrder5);

double reflectivity_semiclassical(const OmParams& p, const SteadyState& ss, double omega);

// |reflection_amplitude(omega)|^2 against pump detuning, re-solving the lowest steady-state
// branch at every point. Second-order resonances show up here when a
// Delta +- 2 Omega mode crosses the probe frequency.
std::vector<double> reflectivity_detuning_sweep(const OmParams& p, const std::vector<double>& deltas, Formalism tag,
                                                double omega = 0.0);

// Depth in dB of the deepest point of y within [center - half_width,
// center + half_width] relative to the straight line joining the window
// edges. Negative for a dip, zero when there is no point below the line.
double dip_depth_db(const std::vector<double>& x, const std::vector<double>& y, double center, double half_width);

// Same baseline, but returns the signed deviation in dB of the point
// furthest from it: negative for a dip, positive for a peak.
double feature_db(const std::vector<double>& x, const std::vector<double>& y, double center, double half_width);

} // namespace omx
