/**
 * @file formalisms.hpp
 * @brief Langevin coefficient systems for the six operator bases.
 *
 *   Linear3       {a, b, b+}
 *   Linearized4   {a, a+, b, b+}      fluctuations around (abar, bbar)
 *   SecondOrder3  {a, ab, ab+}
 *   ThirdOrder5   {a, ab, ab+, ab^2, ab+^2}
 *   Full6         {a, b, ab, ab+, n, c}
 *   Minimal3      {N, B, B+} = {n^2, nb, nb+}
 */
#pragma once

#include "omx/linalg.hpp"
#include "omx/params.hpp"
#include "omx/steady.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace omx {

enum class Formalism { Linear3, Linearized4, SecondOrder3, ThirdOrder5, Full6, Minimal3 };

std::string_view formalism_name(Formalism f);  // "lin3", "lin4", ...
Formalism parse_formalism(std::string_view s); // throws ConfigError
std::size_t dimension(Formalism f);

enum class PortKind { Optical, Mechanical };

struct CoeffSystem {
    Formalism tag = Formalism::SecondOrder3;
    CMatrix M;        // state matrix, rad/s
    CMatrix noise_in; // map from input noises to state equations
    CMatrix drive;    // n x 2 map applied to (alpha, alpha*)
    bool drive_printed = true;
    std::vector<std::string> basis_labels;
    std::vector<double> decay_diag; // empty unless the basis has a diagonal decay matrix
    // Input-output coupling used for the scattering matrix and the kind of
    // bath behind each input column.
    CMatrix ports;
    std::vector<PortKind> port_kinds;
};

struct BuildOptions {
    // s = g0*bbar on the sideband diagonals (SecondOrder3, Full6).
    bool include_s = true;
};

CoeffSystem build_system(Formalism tag, const OmParams& p, const SteadyState& ss, BuildOptions opts = {});

enum class NoiseMode { ZerothOrder, DiagDecay };

// Throws CapabilityError for unsupported (tag, mode) pairs.
CMatrix noise_matrix(Formalism tag, const OmParams& p, const SteadyState& ss, NoiseMode mode);

struct DriveMap {
    CMatrix beta;
    bool printed = true; // false: no drive map exists for the basis, beta is zero
};

DriveMap drive_matrix(Formalism tag, const SteadyState& ss);

// Boolean non-zero pattern of the Full6 coefficient matrix.
std::vector<std::vector<bool>> full6_pattern();

} // namespace omx
