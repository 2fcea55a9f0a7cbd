#include "omx/spectra.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace omx {

namespace {

constexpr cplx I{0.0, 1.0};

double parse_number(std::string_view s, std::string_view what)
{
    const std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(str, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != str.size())
        throw ConfigError("grid: cannot parse " + std::string(what) + " '" + str + "'");
    return v;
}

// Common denominator of the SecondOrder3 rational forms.
cplx so3_denominator(const OmParams& p, const SteadyState& ss, double w)
{
    const double g0 = p.g0, D = ss.Delta, W = p.Omega, k = p.kappa, g = p.gamma();
    const cplx x = w - D - 0.5 * I * g;
    return 2.0 * g0 * g0 * ((D - w + 0.5 * I * g) * (ss.mbar + 0.5) + W * (ss.nbar + 0.5)) +
           (w - D - 0.5 * I * k) * (x * x - W * W);
}

cplx checked_div(cplx num, cplx den)
{
    if (den == cplx{})
        throw NumericError("closed_form_fields: evaluated on a pole");
    return num / den;
}

} // namespace

FrequencyGrid::FrequencyGrid(double start_, double stop_, double step_) : start(start_), stop(stop_), step(step_)
{
    if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop))
        throw ConfigError("grid: step must be positive and bounds finite");
    if (stop < start)
        throw ConfigError("grid: stop must not precede start");
    if ((stop - start) / step >= 1e7)
        throw ConfigError("grid: more than 1e7 points");
}

std::size_t FrequencyGrid::size() const
{
    return static_cast<std::size_t>(std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9)) + 1;
}

std::vector<double> FrequencyGrid::values() const
{
    std::vector<double> v(size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = at(i);
    return v;
}

FrequencyGrid FrequencyGrid::parse_hz(std::string_view text)
{
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
        throw ConfigError("grid: expected start:stop:step, got '" + std::string(text) + "'");
    const double a = parse_number(text.substr(0, c1), "start");
    const double b = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "stop");
    const double s = parse_number(text.substr(c2 + 1), "step");
    return FrequencyGrid(phys::two_pi * a, phys::two_pi * b, phys::two_pi * s);
}

CMatrix scattering_matrix(const CoeffSystem& sys, double omega)
{
    const CMatrix& P = sys.ports;
    const CMatrix X = resolvent_solve(sys.M, omega, P);
    CMatrix Y = CMatrix::identity(P.cols());
    Y -= P.transpose() * X;
    return Y;
}

std::array<cplx, 3> closed_form_y_row(const OmParams& p, const SteadyState& ss, double w)
{
    const double D = ss.Delta, W = p.Omega, g = p.gamma();
    const cplx den = so3_denominator(p, ss, w);
    const cplx x = w - D - 0.5 * I * g;
    const cplx c = -I * p.g0 * std::sqrt(g * p.kappa_ex);
    return {1.0 - I * p.kappa_ex * (x * x - W * W) / den, c * (x - W) / den, c * (x + W) / den};
}

FieldSpectra closed_form_fields(const OmParams& p, const SteadyState& ss, double w)
{
    const double g0 = p.g0, D = ss.Delta, W = p.Omega, k = p.kappa, g = p.gamma(), G = p.Gamma;
    const double n = ss.nbar, m = ss.mbar;
    const cplx al = ss.alpha;
    const cplx den = so3_denominator(p, ss, w);
    const cplx lo = (w + W - 0.5 * I * G) * den;
    const cplx hi = (w + W + 0.5 * I * G) * den;

    FieldSpectra f;
    f.b = checked_div(al, I * (w + W) + 0.5 * G);
    f.a = checked_div(-al * al * g0 * (w - D - W - 0.5 * I * g), lo);
    f.ab = checked_div(al * al * (g0 * g0 * (m - n) - (w - D - 0.5 * I * k) * (w - D - W - 0.5 * I * g)), lo);
    f.abdag = checked_div(-std::norm(al) * (g0 * g0 * (m + n + 1.0) - (w - D - 0.5 * I * k) * (w - D + W - 0.5 * I * g)),
                          hi);
    return f;
}

SpectrumResult spectrum_additive(const CoeffSystem& sys, const FrequencyGrid& grid, double m)
{
    const std::size_t N = grid.size();
    SpectrumResult r;
    r.grid = grid;
    r.total.assign(N, 0.0);
    r.cavity.assign(N, 0.0);
    r.sb1.assign(N, 0.0);
    r.sb2.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const CMatrix Y = scattering_matrix(sys, grid.at(i));
        for (std::size_t j = 0; j < Y.cols(); ++j) {
            const double y2 = std::norm(Y(0, j));
            if (sys.port_kinds.at(j) == PortKind::Optical)
                r.cavity[i] += 0.5 * y2;
            else
                r.sb1[i] += (m + 0.5) * y2;
        }
        r.total[i] = r.cavity[i] + r.sb1[i];
    }
    return r;
}

SpectrumResult spectrum_multiplicative(const CoeffSystem& sys, const OmParams& p, const SteadyState& ss,
                                       const FrequencyGrid& grid, double m)
{
    if (sys.tag != Formalism::SecondOrder3 && sys.tag != Formalism::ThirdOrder5)
        throw CapabilityError("spectrum_multiplicative: needs so3 or to5, got " +
                              std::string(formalism_name(sys.tag)));
    const bool third = sys.tag == Formalism::ThirdOrder5;
    const std::size_t N = grid.size();
    const double h = grid.step;

    // Integration grid: same step, four times as many points, centred on the
    // output grid, cosine taper over its outer tenth.
    const std::size_t Nw = 4 * N;
    const double centre = 0.5 * (grid.start + grid.at(N - 1));
    const double wstart = centre - 0.5 * static_cast<double>(Nw - 1) * h;
    const std::size_t edge = std::max<std::size_t>(1, Nw / 10);
    std::vector<double> weight(Nw, h);
    weight.front() = weight.back() = 0.5 * h;
    for (std::size_t k = 0; k < edge; ++k) {
        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(edge)));
        weight[k] *= t;
        weight[Nw - 1 - k] *= t;
    }

    std::vector<cplx> fa(Nw), fab(Nw), fabd(Nw);
    for (std::size_t k = 0; k < Nw; ++k) {
        const auto f = closed_form_fields(p, ss, wstart + static_cast<double>(k) * h);
        fa[k] = f.a * weight[k];
        fab[k] = f.ab * weight[k];
        fabd[k] = f.abdag * weight[k];
    }

    // Kernel values at omega_i - omega'_k = (start - wstart) + (i - k) h,
    // indexed by j = i - k + (Nw - 1).
    const std::size_t Nk = N + Nw - 1;
    const double off = grid.start - wstart;
    std::vector<cplx> y1(Nk), y4(third ? Nk : 0), y5(third ? Nk : 0);
    for (std::size_t j = 0; j < Nk; ++j) {
        const double w = off + (static_cast<double>(j) - static_cast<double>(Nw - 1)) * h;
        const CMatrix Y = scattering_matrix(sys, w);
        y1[j] = Y(0, 1) + Y(0, 2);
        if (third) {
            y4[j] = Y(0, 3);
            y5[j] = Y(0, 4);
        }
    }

    const auto c1 = toeplitz_convolve(y1, fa, N);
    std::vector<cplx> c2;
    if (third) {
        c2 = toeplitz_convolve(y4, fab, N);
        const auto c2b = toeplitz_convolve(y5, fabd, N);
        for (std::size_t i = 0; i < N; ++i)
            c2[i] += c2b[i];
    }

    const double gm = p.gamma(), th = p.theta();
    const double sbb = m + 0.5;
    SpectrumResult r;
    r.grid = grid;
    r.total.assign(N, 0.0);
    r.cavity.assign(N, 0.0);
    r.sb1.assign(N, 0.0);
    r.sb2.assign(N, 0.0);
    r.flagged.assign(N, false);
    for (std::size_t i = 0; i < N; ++i) {
        const double w = grid.at(i);
        r.cavity[i] = 0.5 * std::norm(scattering_matrix(sys, w)(0, 0));
        r.sb1[i] = std::norm(c1[i]) * sbb / (gm * gm);
        if (third)
            r.sb2[i] = std::norm(c2[i]) * sbb / (th * th);
        r.total[i] = r.cavity[i] + r.sb1[i] + r.sb2[i];
        r.flagged[i] = std::abs(w - ss.Delta) > 0.5 * p.Omega;
    }
    return r;
}

std::vector<cplx> toeplitz_convolve(const std::vector<cplx>& kernel, const std::vector<cplx>& f, std::size_t n_out)
{
    if (f.empty() || kernel.size() < n_out + f.size() - 1)
        throw std::invalid_argument("toeplitz_convolve: kernel too short");
    const std::size_t nf = f.size();
    std::vector<cplx> out(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        cplx acc{};
        for (std::size_t k = 0; k < nf; ++k)
            acc += kernel[i + nf - 1 - k] * f[k];
        out[i] = acc;
    }
    return out;
}

cplx reflection_amplitude(const CoeffSystem& sys, double omega)
{
    return 2.0 - scattering_matrix(sys, omega)(0, 0);
}

double reflectivity_semiclassical(const OmParams& p, const SteadyState& ss, double w)
{
    const cplx R = 1.0 - I * p.kappa_ex / (w + ss.Delta + kerr_coefficient(p) * ss.nbar + 0.5 * I * p.kappa);
    return std::norm(R);
}

Reflectivity reflectivity(const OmParams& p, const SteadyState& ss, const FrequencyGrid& grid, Formalism tag)
{
    const CoeffSystem sys = build_system(tag, p, ss);
    Reflectivity r;
    const std::size_t N = grid.size();
    r.semiclassical.resize(N);
    r.scattering.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double w = grid.at(i);
        r.semiclassical[i] = reflectivity_semiclassical(p, ss, w);
        r.scattering[i] = std::norm(reflection_amplitude(sys, w));
    }
    return r;
}

std::vector<double> reflectivity_detuning_sweep(const OmParams& p, const std::vector<double>& deltas, Formalism tag,
                                                double omega)
{
    std::vector<double> out;
    out.reserve(deltas.size());
    for (double d : deltas) {
        const CoeffSystem sys = build_system(tag, p, steady_state(p, d));
        out.push_back(std::norm(reflection_amplitude(sys, omega)));
    }
    return out;
}

namespace {

// Deviations in dB from the chord joining the window edges.
std::vector<double> chord_deviations_db(const std::vector<double>& x, const std::vector<double>& y, double center,
                                        double half_width, const char* who)
{
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(who) + ": size mismatch");
    const double lo = center - half_width, hi = center + half_width;
    std::size_t first = x.size(), last = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi)
            continue;
        first = std::min(first, i);
        last = std::max(last, i);
    }
    if (first >= last)
        throw std::invalid_argument(std::string(who) + ": window holds fewer than two points");
    std::vector<double> dev;
    for (std::size_t i = first; i <= last; ++i) {
        const double t = (x[i] - x[first]) / (x[last] - x[first]);
        const double base = y[first] + t * (y[last] - y[first]);
        if (base > 0.0 && y[i] > 0.0)
            dev.push_back(10.0 * std::log10(y[i] / base));
    }
    return dev;
}

} // namespace

double dip_depth_db(const std::vector<double>& x, const std::vector<double>& y, double center, double half_width)
{
    double depth = 0.0;
    for (double d : chord_deviations_db(x, y, center, half_width, "dip_depth_db"))
        depth = std::min(depth, d);
    return depth;
}

double feature_db(const std::vector<double>& x, const std::vector<double>& y, double center, double half_width)
{
    double worst = 0.0;
    for (double d : chord_deviations_db(x, y, center, half_width, "feature_db"))
        if (std::abs(d) > std::abs(worst))
            worst = d;
    return worst;
}

} // namespace omx
