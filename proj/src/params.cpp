#include "omx/params.hpp"

#include "omx/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace omx {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("config: '") + name + "' must be a positive finite number");
}

void require_nonnegative(double v, const char* name)
{
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("config: '") + name + "' must be a non-negative finite number");
}

} // namespace

void OmParams::validate() const
{
    require_nonnegative(g0, "g0");
    require_positive(Omega, "Omega");
    require_positive(kappa, "kappa");
    require_positive(Gamma, "Gamma");
    require_positive(omega_c, "omega_c");
    require_positive(lambda_opt, "lambda_opt");
    require_nonnegative(T, "T");
    require_nonnegative(P_op, "P_op");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ConfigError("config: 'eta' must lie in [0, 1]");
    if (kappa_ex != eta * kappa)
        throw ConfigError("params: kappa_ex must equal eta * kappa");
    if (std::abs(omega_c * lambda_opt - phys::two_pi * phys::c) > 1e-12 * phys::two_pi * phys::c)
        throw ConfigError("params: omega_c and lambda_opt are inconsistent");
}

OmParams OmParams::with_power(double watts) const
{
    OmParams p = *this;
    p.P_op = watts;
    return p;
}

OmParams OmParams::with_temperature(double kelvin) const
{
    OmParams p = *this;
    p.T = kelvin;
    return p;
}

OmParams OmParams::with_g0(double g0_new) const
{
    OmParams p = *this;
    p.g0 = g0_new;
    return p;
}

OmParams derive_rates(const RawConfig& raw)
{
    require_positive(raw.g0_hz, "g0_hz");
    require_positive(raw.omega_m_hz, "omega_m_hz");
    require_positive(raw.q_opt, "q_opt");
    require_positive(raw.q_mech, "q_mech");
    require_positive(raw.lambda_m, "lambda_m");
    require_nonnegative(raw.temp_k, "temp_k");
    require_nonnegative(raw.power_w, "power_w");
    if (raw.q_opt < 1.0)
        throw ConfigError("config: 'q_opt' must be >= 1");
    if (raw.q_mech < 1.0)
        throw ConfigError("config: 'q_mech' must be >= 1");
    if (!(raw.eta >= 0.0 && raw.eta <= 1.0))
        throw ConfigError("config: 'eta' must lie in [0, 1]");

    OmParams p;
    p.g0 = phys::two_pi * raw.g0_hz;
    p.Omega = phys::two_pi * raw.omega_m_hz;
    p.lambda_opt = raw.lambda_m;
    p.omega_c = phys::two_pi * phys::c / raw.lambda_m;
    p.kappa = p.omega_c / raw.q_opt;
    p.Gamma = p.Omega / raw.q_mech;
    p.eta = raw.eta;
    p.kappa_ex = p.eta * p.kappa;
    p.T = raw.temp_k;
    p.P_op = raw.power_w;
    p.validate();
    return p;
}

RawConfig to_raw(const OmParams& p)
{
    RawConfig r;
    r.g0_hz = p.g0 / phys::two_pi;
    r.omega_m_hz = p.Omega / phys::two_pi;
    r.q_opt = p.omega_c / p.kappa;
    r.q_mech = p.Omega / p.Gamma;
    r.lambda_m = p.lambda_opt;
    r.eta = p.eta;
    r.temp_k = p.T;
    r.power_w = p.P_op;
    return r;
}

RawConfig parse_config(std::string_view json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config: top level must be a flat object");

    struct Key {
        const char* name;
        double RawConfig::*field;
        bool required;
    };
    static constexpr Key keys[] = {
        {"g0_hz", &RawConfig::g0_hz, true},        {"omega_m_hz", &RawConfig::omega_m_hz, true},
        {"q_opt", &RawConfig::q_opt, true},        {"q_mech", &RawConfig::q_mech, true},
        {"lambda_m", &RawConfig::lambda_m, true},  {"eta", &RawConfig::eta, false},
        {"temp_k", &RawConfig::temp_k, false},     {"power_w", &RawConfig::power_w, false},
    };

    for (const auto& [name, value] : j.items()) {
        bool known = false;
        for (const auto& k : keys)
            known = known || name == k.name;
        if (!known)
            throw ConfigError("config: unknown key '" + name + "'");
        if (!value.is_number())
            throw ConfigError("config: '" + name + "' must be a number");
    }

    RawConfig raw;
    for (const auto& k : keys) {
        if (j.contains(k.name))
            raw.*(k.field) = j.at(k.name).get<double>();
        else if (k.required)
            throw ConfigError(std::string("config: missing key '") + k.name + "'");
    }
    return raw;
}

RawConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RawConfig& raw)
{
    nlohmann::ordered_json j;
    j["g0_hz"] = raw.g0_hz;
    j["omega_m_hz"] = raw.omega_m_hz;
    j["q_opt"] = raw.q_opt;
    j["q_mech"] = raw.q_mech;
    j["lambda_m"] = raw.lambda_m;
    j["eta"] = raw.eta;
    j["temp_k"] = raw.temp_k;
    j["power_w"] = raw.power_w;
    return j.dump(2);
}

double thermal_occupancy(double Omega, double T)
{
    if (T <= 0.0)
        return 0.0;
    const double x = phys::hbar * Omega / (phys::kB * T);
    return 1.0 / std::expm1(x);
}

double drive_amplitude(const OmParams& p, double power_w)
{
    if (power_w <= 0.0)
        return 0.0;
    return std::sqrt(p.eta * p.kappa * power_w / (phys::hbar * p.omega_c));
}

double drive_amplitude(const OmParams& p)
{
    return drive_amplitude(p, p.P_op);
}

double power_for_drive(const OmParams& p, double alpha_mag)
{
    return alpha_mag * alpha_mag * phys::hbar * p.omega_c / (p.eta * p.kappa);
}

Cooperativity cooperativity(const OmParams& p, double nbar, CoopConvention conv)
{
    const double factor = conv == CoopConvention::Table ? table_cooperativity_factor : 1.0;
    Cooperativity c;
    c.C0 = factor * p.g0 * p.g0 / (p.kappa * p.Gamma);
    c.C = nbar * c.C0;
    return c;
}

double kerr_coefficient(const OmParams& p)
{
    return 2.0 * p.g0 * p.g0 * p.Omega / (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
}

} // namespace omx
