#include "omx/formalisms.hpp"

#include "omx/errors.hpp"

#include <cmath>

namespace omx {

namespace {

constexpr cplx I{0.0, 1.0};

CMatrix real_diag(std::initializer_list<double> d)
{
    std::vector<cplx> v(d.begin(), d.end());
    return CMatrix::diagonal(v);
}

// Scattering ports: the input-noise map with the optical columns rescaled
// from the total to the external coupling rate.
CMatrix external_ports(const CMatrix& noise_in, const std::vector<PortKind>& kinds, const OmParams& p)
{
    CMatrix ports = noise_in;
    const double scale = std::sqrt(p.kappa_ex / p.kappa);
    for (std::size_t j = 0; j < kinds.size(); ++j)
        if (kinds[j] == PortKind::Optical)
            for (std::size_t i = 0; i < ports.rows(); ++i)
                ports(i, j) *= scale;
    return ports;
}

} // namespace

std::string_view formalism_name(Formalism f)
{
    switch (f) {
    case Formalism::Linear3: return "lin3";
    case Formalism::Linearized4: return "lin4";
    case Formalism::SecondOrder3: return "so3";
    case Formalism::ThirdOrder5: return "to5";
    case Formalism::Full6: return "full6";
    case Formalism::Minimal3: return "min3";
    }
    return "?";
}

Formalism parse_formalism(std::string_view s)
{
    for (auto f : {Formalism::Linear3, Formalism::Linearized4, Formalism::SecondOrder3, Formalism::ThirdOrder5,
                   Formalism::Full6, Formalism::Minimal3})
        if (formalism_name(f) == s)
            return f;
    throw ConfigError("unknown formalism '" + std::string(s) + "' (expected lin3, lin4, so3, to5, full6, min3)");
}

std::size_t dimension(Formalism f)
{
    switch (f) {
    case Formalism::Linear3:
    case Formalism::SecondOrder3:
    case Formalism::Minimal3: return 3;
    case Formalism::Linearized4: return 4;
    case Formalism::ThirdOrder5: return 5;
    case Formalism::Full6: return 6;
    }
    return 0;
}

CMatrix noise_matrix(Formalism tag, const OmParams& p, const SteadyState& ss, NoiseMode mode)
{
    const double sk = std::sqrt(p.kappa);
    const double sG = std::sqrt(p.Gamma);
    const cplx b = ss.bbar;
    const double n = ss.nbar;
    const double m = ss.mbar;

    if (mode == NoiseMode::DiagDecay) {
        const double sg = std::sqrt(p.gamma()), st = std::sqrt(p.theta());
        if (tag == Formalism::ThirdOrder5)
            return real_diag({sk, sg, sg, st, st});
        if (tag == Formalism::SecondOrder3)
            return real_diag({sk, sg, sg});
        throw CapabilityError("noise_matrix: diag_decay is defined only for so3 and to5, not " +
                              std::string(formalism_name(tag)));
    }

    switch (tag) {
    case Formalism::SecondOrder3: {
        const double sGn = std::sqrt(p.Gamma * n);
        return CMatrix{{sk, 0.0, 0.0}, {sk * b, sGn, 0.0}, {sk * std::conj(b), 0.0, sGn}};
    }
    case Formalism::ThirdOrder5: {
        const double sGn = std::sqrt(p.Gamma * n);
        const double sGnm = std::sqrt(p.Gamma * n * m);
        const double skm = std::sqrt(0.5 * p.kappa * m);
        const double half = 0.5 * sk * m;
        return CMatrix{{sk, 0.0, 0.0},
                       {skm, sGn, 0.0},
                       {skm, 0.0, sGn},
                       {half, sGnm, 0.0},
                       {half, 0.0, sGnm}};
    }
    case Formalism::Full6: {
        const double sK = std::sqrt(n * p.kappa);
        const double sGn = std::sqrt(p.Gamma * n);
        return CMatrix{{sk, 0.0, 0.0, 0.0},         {0.0, 0.0, sG, 0.0},
                       {sk * b, 0.0, sGn, 0.0},     {sk * std::conj(b), 0.0, 0.0, sGn},
                       {sK, sK, 0.0, 0.0},          {sK, 0.0, 0.0, 0.0}};
    }
    case Formalism::Linear3: return real_diag({sk, sG, sG});
    case Formalism::Linearized4: return real_diag({sk, sk, sG, sG});
    case Formalism::Minimal3: {
        const double c = 2.0 * std::sqrt(p.kappa * n);
        return CMatrix{{c * n, 0.0, 0.0}, {c * b, sG * n, 0.0}, {c * std::conj(b), 0.0, sG * n}};
    }
    }
    throw CapabilityError("noise_matrix: unsupported formalism");
}

DriveMap drive_matrix(Formalism tag, const SteadyState& ss)
{
    const cplx b = ss.bbar;
    const cplx bc = std::conj(b);
    const double rn = std::sqrt(ss.nbar);
    DriveMap d;
    switch (tag) {
    case Formalism::SecondOrder3:
        d.beta = CMatrix{{1.0, 0.0}, {b, 0.0}, {bc, 0.0}};
        break;
    case Formalism::ThirdOrder5:
        d.beta = CMatrix{{1.0, 0.0}, {b, 0.0}, {bc, 0.0}, {b * b, 0.0}, {bc * bc, 0.0}};
        break;
    case Formalism::Full6:
        d.beta = CMatrix{{1.0, 0.0}, {0.0, 0.0}, {b, 0.0}, {bc, 0.0}, {rn, rn}, {rn, 0.0}};
        break;
    case Formalism::Minimal3: {
        // classical forcing +2 sqrt(n) (n, b) Re(alpha), written for dA/dt = M A - beta (alpha, alpha*)
        const double n = ss.nbar;
        d.beta = CMatrix{{-rn * n, -rn * n}, {-rn * b, -rn * b}, {-rn * bc, -rn * bc}};
        break;
    }
    case Formalism::Linear3:
    case Formalism::Linearized4:
        d.beta = CMatrix(dimension(tag), 2);
        d.printed = false;
        break;
    }
    return d;
}

CoeffSystem build_system(Formalism tag, const OmParams& p, const SteadyState& ss, BuildOptions opts)
{
    const double D = ss.Delta;
    const double W = p.Omega;
    const double k = p.kappa;
    const double G = p.Gamma;
    const double gm = p.gamma();
    const double th = p.theta();
    const double g0 = p.g0;
    const double n = ss.nbar;
    const double m = ss.mbar;
    const cplx s = opts.include_s ? g0 * ss.bbar : cplx{};

    CoeffSystem sys;
    sys.tag = tag;
    const auto drive = drive_matrix(tag, ss);
    sys.drive = drive.beta;
    sys.drive_printed = drive.printed;

    switch (tag) {
    case Formalism::Linear3:
        sys.M = CMatrix{{I * D - 0.5 * k, I * g0, I * g0}, {0.0, -I * W - 0.5 * G, 0.0}, {0.0, 0.0, I * W - 0.5 * G}};
        sys.basis_labels = {"a", "b", "b+"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.port_kinds = {PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical};
        sys.ports = external_ports(sys.noise_in, sys.port_kinds, p);
        break;

    case Formalism::Linearized4: {
        const cplx g = g0 * std::sqrt(n);
        sys.M = CMatrix{{I * D - 0.5 * k, 0.0, I * g, I * g},
                        {0.0, -I * D - 0.5 * k, -I * g, -I * g},
                        {I * g, I * g, -I * W - 0.5 * G, 0.0},
                        {-I * g, -I * g, 0.0, I * W - 0.5 * G}};
        sys.basis_labels = {"a", "a+", "b", "b+"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.port_kinds = {PortKind::Optical, PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical};
        sys.ports = external_ports(sys.noise_in, sys.port_kinds, p);
        break;
    }

    case Formalism::SecondOrder3: {
        const double F = g0 * n;
        const double fp = g0 * (m + 1.0);
        const double fm = g0 * m;
        sys.M = CMatrix{{I * D - 0.5 * k, I * g0, I * g0},
                        {I * (F + fp), -I * (W - D) - 0.5 * gm + I * s, 0.0},
                        {I * (fm - F), 0.0, I * (W + D) - 0.5 * gm + I * std::conj(s)}};
        sys.basis_labels = {"a", "ab", "ab+"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.decay_diag = {k, gm, gm};
        sys.ports = real_diag({std::sqrt(p.kappa_ex), std::sqrt(gm), std::sqrt(gm)});
        sys.port_kinds = {PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical};
        break;
    }

    case Formalism::ThirdOrder5:
        sys.M = CMatrix{{I * D - 0.5 * k, I * g0, I * g0, 0.0, 0.0},
                        {I * g0 * (m + n + 1.0), -I * (W - D) - 0.5 * gm, 0.0, I * g0, 0.0},
                        {I * g0 * (m - n), 0.0, I * (W + D) - 0.5 * gm, 0.0, I * g0},
                        {0.0, I * g0 * (m + 2.0 * n + 2.0), 0.0, -I * (2.0 * W - D) - 0.5 * th, 0.0},
                        {0.0, 0.0, I * g0 * (m - 2.0 * n - 1.0), 0.0, I * (2.0 * W + D) - 0.5 * th}};
        sys.basis_labels = {"a", "ab", "ab+", "ab^2", "ab+^2"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.decay_diag = {k, gm, gm, th, th};
        sys.ports = real_diag({std::sqrt(p.kappa_ex), std::sqrt(gm), std::sqrt(gm), std::sqrt(th), std::sqrt(th)});
        sys.port_kinds = {PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical, PortKind::Mechanical,
                          PortKind::Mechanical};
        break;

    case Formalism::Full6: {
        const double Lp = g0 * (m + n + 1.0);
        const double Lm = g0 * (m - n);
        const double g = g0 * std::sqrt(n);
        sys.M = CMatrix{{I * D - 0.5 * k, 0.0, I * g0, I * g0, 0.0, 0.0},
                        {0.0, -(I * W + 0.5 * G), 0.0, 0.0, I * g0, 0.0},
                        {I * Lp, 0.0, -I * (W - D - s) - 0.5 * gm, 0.0, 0.0, 0.0},
                        {I * Lm, 0.0, 0.0, I * (W + D + std::conj(s)) - 0.5 * gm, 0.0, 0.0},
                        {0.0, 0.0, 0.0, 0.0, -k, 0.0},
                        {0.0, 0.0, I * g, I * g, 0.0, 2.0 * I * (D + 2.0 * s.real()) - k}};
        sys.basis_labels = {"a", "b", "ab", "ab+", "n", "c"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.port_kinds = {PortKind::Optical, PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical};
        sys.ports = external_ports(sys.noise_in, sys.port_kinds, p);
        break;
    }

    case Formalism::Minimal3:
        sys.M = CMatrix{{-2.0 * k, 0.0, 0.0}, {I * g0, -I * W - 0.5 * gm, 0.0}, {I * g0, 0.0, I * W - 0.5 * gm}};
        sys.basis_labels = {"N", "B", "B+"};
        sys.noise_in = noise_matrix(tag, p, ss, NoiseMode::ZerothOrder);
        sys.ports = sys.noise_in;
        sys.port_kinds = {PortKind::Optical, PortKind::Mechanical, PortKind::Mechanical};
        break;
    }
    return sys;
}

std::vector<std::vector<bool>> full6_pattern()
{
    return {{true, false, true, true, false, false},  {false, true, false, false, true, false},
            {true, false, true, false, false, false}, {true, false, false, true, false, false},
            {false, false, false, false, true, false}, {false, false, true, true, false, true}};
}

} // namespace omx
