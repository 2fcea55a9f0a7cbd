/**
 * @file params.hpp
 * @brief Physical parameters of one optomechanical system, unit
 *        conversion from config files, and a few derived quantities.
 *
 * Internally every frequency and rate is angular (rad/s). Config files
 * carry cycles/s and quality factors.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace omx {

namespace phys {
// CODATA 2018 (exact SI values for kB and c, hbar to 10 significant digits).
inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double kB = 1.380649e-23;      // J / K
inline constexpr double c = 299792458.0;        // m / s
inline constexpr double two_pi = 6.283185307179586476925286766559;
} // namespace phys

// Config-file view: frequencies in Hz, optical/mechanical quality factors.
struct RawConfig {
    double g0_hz = 0.0;
    double omega_m_hz = 0.0;
    double q_opt = 0.0;
    double q_mech = 0.0;
    double lambda_m = 0.0;
    double eta = 1.0;
    double temp_k = 0.0;
    double power_w = 0.0;

    bool operator==(const RawConfig&) const = default;
};

struct OmParams {
    double g0 = 0.0;         // single-photon coupling
    double Omega = 0.0;      // mechanical resonance
    double kappa = 0.0;      // optical decay
    double Gamma = 0.0;      // mechanical decay
    double kappa_ex = 0.0;   // external coupling, eta * kappa
    double eta = 1.0;
    double omega_c = 0.0;    // optical carrier
    double lambda_opt = 0.0; // m
    double T = 0.0;          // K
    double P_op = 0.0;       // W

    double gamma() const noexcept { return kappa + Gamma; }
    double theta() const noexcept { return kappa + 2.0 * Gamma; }

    // Throws ConfigError on any broken invariant.
    void validate() const;

    OmParams with_power(double watts) const;
    OmParams with_temperature(double kelvin) const;
    OmParams with_g0(double g0_new) const;
};

OmParams derive_rates(const RawConfig& raw);
RawConfig to_raw(const OmParams& p);

// Flat JSON object with the keys of RawConfig. Unknown keys are errors.
RawConfig parse_config(std::string_view json_text);
RawConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RawConfig& raw);

// Bose-Einstein occupancy 1/(exp(hbar*Omega/kB*T) - 1); exactly 0 at T = 0.
double thermal_occupancy(double Omega, double T);

// |alpha| = sqrt(eta * kappa * P / (hbar * omega_c)), in s^-1/2.
double drive_amplitude(const OmParams& p);
double drive_amplitude(const OmParams& p, double power_w);
// Inverse of drive_amplitude for a given |alpha|.
double power_for_drive(const OmParams& p, double alpha_mag);

enum class CoopConvention {
    Table,   // C0 = 4 g0^2 / (kappa Gamma)
    MainText // C0 = g0^2 / (kappa Gamma)
};

struct Cooperativity {
    double C0 = 0.0;
    double C = 0.0;
};

inline constexpr double table_cooperativity_factor = 4.0;

Cooperativity cooperativity(const OmParams& p, double nbar, CoopConvention conv = CoopConvention::Table);

// 2 g0^2 Omega / (Omega^2 + Gamma^2/4): the static Kerr-like frequency pull
// per intracavity photon.
double kerr_coefficient(const OmParams& p);

} // namespace omx
