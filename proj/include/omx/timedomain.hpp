/**
 * @file timedomain.hpp
 * @brief Deterministic expectation-value dynamics under a time-dependent
 *        drive, and the closed-form minimal-basis solution.
 *
 * Dynamics follow dA/dt = M(t) A - beta(t) (alpha(t), alpha*(t)), with
 * M and beta rebuilt from the momentary steady state at each step midpoint
 * and held fixed across the step.
 */
#pragma once

#include "omx/formalisms.hpp"

#include <functional>
#include <vector>

namespace omx {

// Sampled complex drive, linearly interpolated and held constant outside
// the sampled range.
class AlphaSeries {
public:
    AlphaSeries() = default;
    AlphaSeries(std::vector<double> times, std::vector<cplx> values); // throws ConfigError

    static AlphaSeries constant(cplx value);

    cplx at(double t) const;
    bool empty() const noexcept { return times_.empty(); }

private:
    std::vector<double> times_;
    std::vector<cplx> values_;
};

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12; // relative to the largest state magnitude seen so far
    double h_init = 0.0; // 0: chosen from ||M||
    double h_min = 0.0;  // 0: 1e-14 times the integration span
    std::size_t max_steps = 50'000'000;
};

struct PulseResult {
    std::vector<double> times;
    std::vector<std::vector<cplx>> trajectories; // [component][time index]
    std::size_t step_count = 0;
    double max_step_error = 0.0;   // largest accepted local error estimate
    double accumulated_error = 0.0; // sum of accepted local error estimates
};

PulseResult evolve_pulsed(const OmParams& p, double Delta, const AlphaSeries& alpha, Formalism tag,
                          const std::vector<double>& t_grid, std::vector<cplx> A0 = {}, IntegratorOptions opts = {});

// dA/dt = M A + f with constant M and f.
PulseResult evolve_constant(const CMatrix& M, const std::vector<cplx>& forcing, const std::vector<double>& t_grid,
                            std::vector<cplx> A0, IntegratorOptions opts = {});

enum class MinimalForcing {
    Consistent, // (2 kappa n^2, kappa n b / 2): stationary point N = n^2, B = n b
    Printed     // 2 sqrt(n) (n, b) Re(alpha)
};

struct MinimalTrajectory {
    std::vector<double> times;
    std::vector<cplx> N; // <n^2>
    std::vector<cplx> B; // <n b>
    cplx N_inf;
    cplx B_inf;
};

// Closed-form solution of the triangular {N, B} system at constant drive.
MinimalTrajectory minimal_dynamics(const OmParams& p, double Delta, double alpha_mag, const std::vector<double>& t_grid,
                                   cplx N0 = {}, cplx B0 = {}, MinimalForcing forcing = MinimalForcing::Consistent);

} // namespace omx
