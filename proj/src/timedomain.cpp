#include "omx/timedomain.hpp"

#include "omx/errors.hpp"
#include "omx/steady.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace omx {

namespace {

constexpr cplx I{0.0, 1.0};

using State = std::vector<cplx>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct StepModel {
    // Called once per attempted step with the step midpoint.
    std::function<void(double)> freeze;
    // Derivative at time t under the frozen model.
    std::function<void(double, const State&, State&)> rhs;
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms)
{
    State out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0)
            continue;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += h * c * (*k)[i];
    }
    return out;
}

PulseResult integrate(const StepModel& model, const std::vector<double>& t_grid, State y, double rate_scale,
                      const IntegratorOptions& opts)
{
    if (t_grid.empty())
        throw ConfigError("time grid is empty");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) ||
        std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end())
        throw ConfigError("time grid must be strictly increasing");

    const std::size_t n = y.size();
    PulseResult res;
    res.times = t_grid;
    res.trajectories.assign(n, std::vector<cplx>(t_grid.size()));
    auto record = [&](std::size_t k) {
        for (std::size_t i = 0; i < n; ++i)
            res.trajectories[i][k] = y[i];
    };
    record(0);

    const double span = t_grid.back() - t_grid.front();
    const double h_min = opts.h_min > 0.0 ? opts.h_min : 1e-14 * std::max(span, 1e-300);
    double h = opts.h_init > 0.0 ? opts.h_init : 0.01 / std::max(rate_scale, 1e-300);
    double t = t_grid.front();
    double ymax = 0.0;
    for (const auto& v : y)
        ymax = std::max(ymax, std::abs(v));

    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    for (std::size_t out = 1; out < t_grid.size(); ++out) {
        const double target = t_grid[out];
        while (t < target) {
            bool last = false;
            if (t + h >= target || target - (t + h) < h_min) {
                h = target - t;
                last = true;
            }
            if (++res.step_count > opts.max_steps)
                throw NumericError("integration: step budget exhausted at t = " + std::to_string(t) + " s");

            model.freeze(t + 0.5 * h);
            model.rhs(t, y, k1);
            model.rhs(t + c2 * h, axpy(y, h, {{a21, &k1}}), k2);
            model.rhs(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}), k3);
            model.rhs(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4);
            model.rhs(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5);
            model.rhs(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
            const State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            model.rhs(t + h, y5, k7);

            double ynew_max = ymax;
            for (const auto& v : y5)
                ynew_max = std::max(ynew_max, std::abs(v));
            const double atol = opts.atol * ynew_max;
            double err_norm = 0.0, err_abs = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err_abs = std::max(err_abs, std::abs(e));
                if (std::abs(e) > 0.0)
                    err_norm = std::max(err_norm, sc > 0.0 ? std::abs(e) / sc : std::numeric_limits<double>::infinity());
            }
            if (!std::isfinite(err_norm) && err_abs > 0.0 && ynew_max == 0.0)
                err_norm = 0.0;

            const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
            if (err_norm <= 1.0) {
                t = last ? target : t + h;
                y = y5;
                ymax = ynew_max;
                res.max_step_error = std::max(res.max_step_error, err_abs);
                res.accumulated_error += err_abs;
                if (!last)
                    h *= factor;
            } else {
                h *= std::min(factor, 0.9);
                if (h < h_min) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "integration: step size underflow at t = %.17g s", t);
                    throw NumericError(buf);
                }
            }
        }
        record(out);
    }
    return res;
}

} // namespace

AlphaSeries::AlphaSeries(std::vector<double> times, std::vector<cplx> values)
    : times_(std::move(times)), values_(std::move(values))
{
    if (times_.size() != values_.size() || times_.empty())
        throw ConfigError("alpha series: needs matching, non-empty time and value arrays");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw ConfigError("alpha series: times must be strictly increasing");
}

AlphaSeries AlphaSeries::constant(cplx value)
{
    return AlphaSeries({0.0}, {value});
}

cplx AlphaSeries::at(double t) const
{
    if (times_.empty())
        return {};
    if (t <= times_.front())
        return values_.front();
    if (t >= times_.back())
        return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times_.begin());
    const double u = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
    return values_[j - 1] + u * (values_[j] - values_[j - 1]);
}

PulseResult evolve_pulsed(const OmParams& p, double Delta, const AlphaSeries& alpha, Formalism tag,
                          const std::vector<double>& t_grid, std::vector<cplx> A0, IntegratorOptions opts)
{
    const std::size_t n = dimension(tag);
    if (A0.empty())
        A0.assign(n, cplx{});
    if (A0.size() != n)
        throw ConfigError("evolve_pulsed: initial state has the wrong dimension");

    CMatrix M, beta;
    double frozen_mag = -1.0;
    auto rebuild = [&](double mag) {
        if (mag == frozen_mag)
            return;
        const SteadyState ss = steady_state(p, Delta, mag);
        const CoeffSystem sys = build_system(tag, p, ss);
        M = sys.M;
        beta = sys.drive;
        frozen_mag = mag;
    };
    rebuild(std::abs(alpha.at(t_grid.empty() ? 0.0 : t_grid.front())));
    const double rate = M.norm_one();

    StepModel model;
    model.freeze = [&](double t_mid) { rebuild(std::abs(alpha.at(t_mid))); };
    model.rhs = [&](double t, const State& y, State& dy) {
        const cplx a = alpha.at(t);
        const cplx ac = std::conj(a);
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = -(beta(i, 0) * a + beta(i, 1) * ac);
            for (std::size_t j = 0; j < n; ++j)
                s += M(i, j) * y[j];
            dy[i] = s;
        }
    };
    return integrate(model, t_grid, std::move(A0), rate, opts);
}

PulseResult evolve_constant(const CMatrix& M, const std::vector<cplx>& forcing, const std::vector<double>& t_grid,
                            std::vector<cplx> A0, IntegratorOptions opts)
{
    const std::size_t n = M.rows();
    if (!M.square() || A0.size() != n || (!forcing.empty() && forcing.size() != n))
        throw ConfigError("evolve_constant: dimension mismatch");
    StepModel model;
    model.freeze = [](double) {};
    model.rhs = [&](double, const State& y, State& dy) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = forcing.empty() ? cplx{} : forcing[i];
            for (std::size_t j = 0; j < n; ++j)
                s += M(i, j) * y[j];
            dy[i] = s;
        }
    };
    return integrate(model, t_grid, std::move(A0), M.norm_one(), opts);
}

MinimalTrajectory minimal_dynamics(const OmParams& p, double Delta, double alpha_mag, const std::vector<double>& t_grid,
                                   cplx N0, cplx B0, MinimalForcing forcing)
{
    const SteadyState ss = steady_state(p, Delta, alpha_mag);
    const double k = p.kappa;
    const double n = ss.nbar;
    const cplx lamN = -2.0 * k;
    const cplx lamB = -I * p.Omega - 0.5 * p.gamma();

    cplx fN, fB;
    if (forcing == MinimalForcing::Consistent) {
        fN = 2.0 * k * n * n;
        fB = 0.5 * k * n * ss.bbar;
    } else {
        const double re = ss.alpha.real();
        fN = 2.0 * std::sqrt(n) * n * re;
        fB = 2.0 * std::sqrt(n) * ss.bbar * re;
    }

    MinimalTrajectory tr;
    tr.times = t_grid;
    tr.N_inf = -fN / lamN;
    tr.B_inf = -(I * p.g0 * tr.N_inf + fB) / lamB;
    const cplx c1 = I * p.g0 * (N0 - tr.N_inf) / (lamN - lamB);
    const cplx c2 = B0 - tr.B_inf - c1;
    tr.N.reserve(t_grid.size());
    tr.B.reserve(t_grid.size());
    for (double t : t_grid) {
        const cplx eN = std::exp(lamN * t);
        tr.N.push_back(tr.N_inf + (N0 - tr.N_inf) * eN);
        tr.B.push_back(tr.B_inf + c1 * eN + c2 * std::exp(lamB * t));
    }
    return tr;
}

} // namespace omx
