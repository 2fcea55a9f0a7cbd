#include "omx/stability.hpp"

#include "omx/errors.hpp"
#include "omx/steady.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace omx {

const char* stability_name(Stability s)
{
    switch (s) {
    case Stability::Stable: return "STABLE";
    case Stability::Unstable: return "UNSTABLE";
    case Stability::Failed: return "FAILED";
    }
    return "?";
}

double max_real_eigenvalue(const CoeffSystem& sys)
{
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& v : eigenvalues(sys.M))
        mx = std::max(mx, v.real());
    return mx;
}

Stability classify(const CoeffSystem& sys, double margin)
{
    return max_real_eigenvalue(sys) > margin ? Stability::Unstable : Stability::Stable;
}

bool marginal(const CoeffSystem& sys, double kappa, double margin)
{
    return std::abs(max_real_eigenvalue(sys) - margin) <= 1e-6 * kappa;
}

namespace {

struct Cell {
    Stability linear = Stability::Failed;
    Stability nonlinear = Stability::Failed;
    double nbar = std::numeric_limits<double>::quiet_NaN();
    double nbar_unstable = std::numeric_limits<double>::quiet_NaN();
    int branches = 0;
};

Stability worst(Stability a, Stability b)
{
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

Cell evaluate_cell(const OmParams& p, double Delta, double power, const PhaseMapOptions& opts)
{
    Cell c;
    try {
        const double amp = drive_amplitude(p, power);
        const SteadyState lo = steady_state(p, Delta, amp, BranchPolicy::lowest());
        c.nbar = lo.nbar;
        c.branches = lo.branch_count;
        c.linear = classify(build_system(Formalism::Linearized4, p, lo), opts.margin);
        c.nonlinear = classify(build_system(opts.nonlinear, p, lo), opts.margin);
        if (c.nonlinear == Stability::Unstable)
            c.nbar_unstable = lo.nbar;
        if (lo.branch_count > 1) {
            const SteadyState hi = steady_state(p, Delta, amp, BranchPolicy::highest());
            c.linear = worst(c.linear, classify(build_system(Formalism::Linearized4, p, hi), opts.margin));
            const Stability top = classify(build_system(opts.nonlinear, p, hi), opts.margin);
            if (top == Stability::Unstable && std::isnan(c.nbar_unstable))
                c.nbar_unstable = hi.nbar;
            c.nonlinear = worst(c.nonlinear, top);
        }
    } catch (const NumericError&) {
        c.linear = c.nonlinear = Stability::Failed;
    }
    return c;
}

bool monotone(const std::vector<double>& v)
{
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

} // namespace

StabilityMap phase_map(const OmParams& p, const std::vector<double>& delta_grid, const std::vector<double>& power_grid,
                       PhaseMapOptions opts)
{
    if (!monotone(delta_grid) || !monotone(power_grid))
        throw ConfigError("phase_map: grids must be strictly increasing");

    StabilityMap map;
    map.delta_grid = delta_grid;
    map.power_grid = power_grid;
    map.nonlinear_tag = opts.nonlinear;
    const std::size_t nd = delta_grid.size(), np = power_grid.size(), total = nd * np;
    map.linear.assign(total, Stability::Failed);
    map.nonlinear.assign(total, Stability::Failed);
    map.nbar.assign(total, 0.0);
    map.nbar_unstable.assign(total, 0.0);
    map.branch_count.assign(total, 0);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const Cell c = evaluate_cell(p, delta_grid[k / np], power_grid[k % np], opts);
            map.linear[k] = c.linear;
            map.nonlinear[k] = c.nonlinear;
            map.nbar[k] = c.nbar;
            map.nbar_unstable[k] = c.nbar_unstable;
            map.branch_count[k] = c.branches;
        }
    };
    unsigned nthreads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, std::max<std::size_t>(total, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    map.p_th_blue = map.p_th_red = map.p_th_blue_linear = map.p_th_red_linear = map.n_cr_empirical = nan;
    auto lower = [](double& slot, double v) {
        if (std::isnan(slot) || v < slot)
            slot = v;
    };
    for (std::size_t i = 0; i < nd; ++i) {
        const double D = delta_grid[i];
        for (std::size_t j = 0; j < np; ++j) {
            const std::size_t k = map.index(i, j);
            if (map.nonlinear[k] == Stability::Unstable) {
                lower(map.n_cr_empirical, map.nbar_unstable[k]);
                if (D > 0.0)
                    lower(map.p_th_blue, power_grid[j]);
                else if (D < 0.0)
                    lower(map.p_th_red, power_grid[j]);
            }
            if (map.linear[k] == Stability::Unstable) {
                if (D > 0.0)
                    lower(map.p_th_blue_linear, power_grid[j]);
                else if (D < 0.0)
                    lower(map.p_th_red_linear, power_grid[j]);
            }
        }
    }
    return map;
}

CriticalPhotons critical_photon_number(const OmParams& p, CoopConvention conv)
{
    const double C0 = cooperativity(p, 0.0, conv).C0;
    const double r = p.Omega / p.kappa;
    return {4.0 / C0 * r * r, p.Omega > p.kappa};
}

} // namespace omx
