/**
 * @file stability.hpp
 * @brief Dynamic stability from eigenvalue real parts and (Delta, power)
 *        phase maps for a linear and a nonlinear formalism.
 */
#pragma once

#include "omx/formalisms.hpp"
#include "omx/params.hpp"

#include <cstdint>
#include <vector>

namespace omx {

enum class Stability : std::uint8_t { Stable, Unstable, Failed };

const char* stability_name(Stability s);

double max_real_eigenvalue(const CoeffSystem& sys);

// Unstable iff the largest real part of the spectrum exceeds margin.
Stability classify(const CoeffSystem& sys, double margin = 0.0);

// Within +-1e-6 kappa of the threshold; diagnostic only.
bool marginal(const CoeffSystem& sys, double kappa, double margin = 0.0);

struct StabilityMap {
    std::vector<double> delta_grid; // rad/s
    std::vector<double> power_grid; // W
    Formalism nonlinear_tag = Formalism::ThirdOrder5;
    // Row-major over (delta, power): index = i_delta * power_grid.size() + i_power.
    std::vector<Stability> linear;
    std::vector<Stability> nonlinear;
    std::vector<double> nbar;          // lowest branch
    std::vector<double> nbar_unstable; // photon number of the unstable branch, NaN if stable
    std::vector<int> branch_count;

    // Lowest power with a nonlinear-unstable cell on Delta > 0 / Delta < 0;
    // NaN when none.
    double p_th_blue = 0.0;
    double p_th_red = 0.0;
    double p_th_blue_linear = 0.0;
    double p_th_red_linear = 0.0;
    // Smallest photon number over nonlinear-unstable cells; NaN when none.
    double n_cr_empirical = 0.0;

    std::size_t index(std::size_t i_delta, std::size_t i_power) const { return i_delta * power_grid.size() + i_power; }
};

struct PhaseMapOptions {
    Formalism nonlinear = Formalism::ThirdOrder5;
    double margin = 0.0;
    unsigned threads = 0; // 0: hardware concurrency
};

// Cells are classified on the lowest steady-state branch and, inside the
// bistable wedge, also on the highest; any unstable branch makes the cell
// unstable. Cells whose steady state cannot be solved are Failed.
StabilityMap phase_map(const OmParams& p, const std::vector<double>& delta_grid, const std::vector<double>& power_grid,
                       PhaseMapOptions opts = {});

struct CriticalPhotons {
    double n_cr = 0.0;
    bool sideband_resolved = true; // Omega > kappa; the heuristic is meant for this regime
};

// n_cr ~ (4 / C0) (Omega / kappa)^2
CriticalPhotons critical_photon_number(const OmParams& p, CoopConvention conv = CoopConvention::Table);

} // namespace omx
