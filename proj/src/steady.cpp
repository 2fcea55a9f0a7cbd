#include "omx/steady.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omx {

namespace {

constexpr cplx I{0.0, 1.0};

double cubic_value(const std::vector<double>& c, double x)
{
    return ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
}

double cubic_slope(const std::vector<double>& c, double x)
{
    return (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2];
}

} // namespace

std::size_t BranchPolicy::resolve(std::size_t root_count) const
{
    if (root_count == 0)
        throw NumericError("steady_state: no admissible root");
    if (idx_ < 0)
        return root_count - 1;
    if (static_cast<std::size_t>(idx_) >= root_count)
        throw ConfigError("steady_state: branch index " + std::to_string(idx_) + " out of range (branch_count = " +
                          std::to_string(root_count) + ")");
    return static_cast<std::size_t>(idx_);
}

std::vector<double> intracavity_cubic(const OmParams& p, double Delta, double alpha_mag)
{
    const double K = kerr_coefficient(p);
    return {K * K, 2.0 * K * Delta, 0.25 * p.kappa * p.kappa + Delta * Delta, -alpha_mag * alpha_mag};
}

std::vector<double> solve_intracavity(const OmParams& p, double Delta, double alpha_mag)
{
    if (alpha_mag < 0.0)
        throw std::invalid_argument("solve_intracavity: negative drive");
    const double A = alpha_mag * alpha_mag;
    const double lin = 0.25 * p.kappa * p.kappa + Delta * Delta;
    if (A == 0.0)
        return {0.0};
    const double K = kerr_coefficient(p);
    if (K == 0.0)
        return {A / lin};

    // Dimensionless form: n = kappa x / K, x^3 + 2 d x^2 + (1/4 + d^2) x - a = 0.
    const double d = Delta / p.kappa;
    const double a = A * K / (p.kappa * p.kappa * p.kappa);
    const double b2 = 2.0 * d, b1 = 0.25 + d * d, b0 = -a;
    const std::vector<cplx> coeffs{1.0, b2, b1, b0};
    const auto z = polynomial_roots(coeffs);

    // Discriminant of the monic cubic decides how many roots are real.
    const double disc = 18.0 * b2 * b1 * b0 - 4.0 * b2 * b2 * b2 * b0 + b2 * b2 * b1 * b1 - 4.0 * b1 * b1 * b1 -
                        27.0 * b0 * b0;
    std::vector<double> xs;
    if (disc >= 0.0) {
        for (const auto& r : z)
            xs.push_back(r.real());
    } else {
        const auto it = std::min_element(z.begin(), z.end(),
                                         [](const cplx& l, const cplx& r) { return std::abs(l.imag()) < std::abs(r.imag()); });
        xs.push_back(it->real());
    }

    const auto cubic = intracavity_cubic(p, Delta, alpha_mag);
    std::vector<double> out;
    const double scale = p.kappa / K;
    for (double x : xs) {
        double n = x * scale;
        for (int it = 0; it < 4; ++it) {
            const double f = cubic_value(cubic, n);
            const double df = cubic_slope(cubic, n);
            if (df == 0.0 || std::abs(f) <= 1e-14 * A)
                break;
            const double step = f / df;
            // Near a double root Newton may walk off; keep it local.
            if (std::abs(step) > 1e-3 * std::max(std::abs(n), 1e-300))
                break;
            n -= step;
        }
        if (n < -1e-9 * std::max(1.0, A / lin))
            continue;
        out.push_back(std::max(n, 0.0));
    }
    std::sort(out.begin(), out.end());
    if (out.empty())
        throw NumericError("solve_intracavity: no non-negative real root");
    return out;
}

std::optional<double> bistability_onset(const OmParams& p, double alpha_mag)
{
    if (p.g0 == 0.0 || alpha_mag == 0.0)
        return std::nullopt;
    // D^3 + pc D + q = 0 with pc > 0: a single real root, negative for q > 0.
    const double pc = 2.25 * p.kappa * p.kappa;
    const double q = 13.5 * kerr_coefficient(p) * alpha_mag * alpha_mag;
    auto f = [&](double D) { return (D * D + pc) * D + q; };
    double lo = -std::min(q / pc, std::cbrt(q));
    double hi = 0.0;
    double D = lo;
    for (int it = 0; it < 200; ++it) {
        const double fv = f(D);
        if (fv == 0.0)
            break;
        if (fv < 0.0)
            lo = D;
        else
            hi = D;
        double next = D - fv / (3.0 * D * D + pc);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - D) <= 1e-16 * std::abs(D))
            break;
        D = next;
    }
    return D;
}

PhononPopulation coherent_phonons(const OmParams& p, double Delta, double nbar)
{
    const double g = p.gamma();
    const double G = p.Gamma;
    const double W = p.Omega;
    const double den_opt = g * g + 4.0 * Delta * Delta;
    const double den_mech = G * G + 4.0 * W * W;
    PhononPopulation out;
    out.approx = 32.0 * p.g0 * p.g0 * W * W * (g * g + g * G + 4.0 * Delta * Delta) * nbar * nbar /
                 (den_opt * den_mech * den_mech);
    out.full = std::max(out.approx - 2.0 * Delta * W / den_opt, 0.0);
    return out;
}

cplx mechanical_amplitude(const OmParams& p, double nbar)
{
    return I * p.g0 * nbar / (I * p.Omega + 0.5 * p.Gamma);
}

cplx gauge_drive(const OmParams& p, double Delta, double nbar)
{
    const double a = std::sqrt(nbar);
    return a * cplx(-0.5 * p.kappa, kerr_coefficient(p) * nbar + Delta);
}

namespace {

void fill_pairs(const OmParams& p, SteadyState& s)
{
    if (p.g0 == 0.0) {
        s.ab_pair = s.abar * s.bbar;
        s.abdag_pair = s.abar * std::conj(s.bbar);
        return;
    }
    const double g0 = p.g0, n = s.nbar, D = s.Delta, W = p.Omega, k = p.kappa, g = p.gamma(), G = p.Gamma;
    const double rn = s.abar;
    const cplx alpha = s.alpha;
    const double mech = 8.0 * G * g0 * g0 * n / (G * G + 4.0 * W * W);
    const cplx den = 4.0 * g0 * cplx(g, -2.0 * D);

    s.ab_pair = (I * rn * (g0 * g0 * (8.0 * n + 4.0) + cplx(2.0 * D, k) * cplx(2.0 * (D + W), g)) -
                 2.0 * I * alpha * (mech + cplx(g, -2.0 * (D + W)))) /
                den;
    s.abdag_pair = (2.0 * alpha * (I * mech + cplx(-2.0 * D + 2.0 * W, -g)) -
                    rn * (4.0 * I * g0 * g0 * (2.0 * n + 1.0) + cplx(k, -2.0 * D) * cplx(2.0 * D - 2.0 * W, g))) /
                   den;
}

} // namespace

SteadyState steady_state(const OmParams& p, double Delta, double alpha_mag, BranchPolicy branch)
{
    const auto roots = solve_intracavity(p, Delta, alpha_mag);
    SteadyState s;
    s.Delta = Delta;
    s.branch_count = static_cast<int>(roots.size());
    s.nbar = roots[branch.resolve(roots.size())];
    s.abar = std::sqrt(s.nbar);
    s.bbar = mechanical_amplitude(p, s.nbar);
    s.alpha = gauge_drive(p, Delta, s.nbar);
    s.m_th = thermal_occupancy(p.Omega, p.T);
    s.mbar = coherent_phonons(p, Delta, s.nbar).full;
    fill_pairs(p, s);
    return s;
}

SteadyState steady_state(const OmParams& p, double Delta, BranchPolicy branch)
{
    return steady_state(p, Delta, drive_amplitude(p), branch);
}

} // namespace omx
