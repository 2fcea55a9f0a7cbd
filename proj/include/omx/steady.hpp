/**
 * @file steady.hpp
 * @brief Classical steady state: intracavity photon number, mechanical
 *        amplitude, complex drive, coherent phonons and pair averages.
 */
#pragma once

#include "omx/linalg.hpp"
#include "omx/params.hpp"

#include <optional>
#include <vector>

namespace omx {

struct SteadyState {
    double Delta = 0.0;
    double nbar = 0.0;
    double abar = 0.0; // sqrt(nbar), real gauge
    cplx bbar;
    cplx alpha;        // drive with the phase fixed by the gauge
    double m_th = 0.0; // thermal phonons
    double mbar = 0.0; // coherent phonons
    cplx ab_pair;      // <a b>
    cplx abdag_pair;   // <a b^dagger>
    int branch_count = 1;
};

class BranchPolicy {
public:
    static BranchPolicy lowest() { return BranchPolicy(0); }
    static BranchPolicy highest() { return BranchPolicy(-1); }
    static BranchPolicy index(int i) { return BranchPolicy(i); }

    // Resolves against the available root count; throws ConfigError carrying
    // the count when an explicit index is out of range.
    std::size_t resolve(std::size_t root_count) const;

private:
    explicit BranchPolicy(int i) : idx_(i) {}
    int idx_;
};

// Real non-negative roots n of
//   K^2 n^3 + 2 K Delta n^2 + (kappa^2/4 + Delta^2) n - |alpha|^2 = 0,
// ascending, double roots listed twice. K is kerr_coefficient(params).
std::vector<double> solve_intracavity(const OmParams& p, double Delta, double alpha_mag);

// Coefficients of the cubic above, highest power first.
std::vector<double> intracavity_cubic(const OmParams& p, double Delta, double alpha_mag);

// Negative detuning solving -D (D^2 + 9 kappa^2/4) = 27 g0^2 Omega |alpha|^2/(Omega^2 + Gamma^2/4).
// Empty when g0 or alpha vanish.
std::optional<double> bistability_onset(const OmParams& p, double alpha_mag);

struct PhononPopulation {
    double full = 0.0;   // including the detuning term, floored at zero
    double approx = 0.0; // leading n^2 term only
};

PhononPopulation coherent_phonons(const OmParams& p, double Delta, double nbar);

SteadyState steady_state(const OmParams& p, double Delta, double alpha_mag,
                         BranchPolicy branch = BranchPolicy::lowest());

// Same, with the drive taken from p.P_op.
SteadyState steady_state(const OmParams& p, double Delta, BranchPolicy branch = BranchPolicy::lowest());

// b = i g0 n / (i Omega + Gamma/2)
cplx mechanical_amplitude(const OmParams& p, double nbar);

// Complex drive consistent with (nbar, Delta) in the real-abar gauge.
cplx gauge_drive(const OmParams& p, double Delta, double nbar);

} // namespace omx
