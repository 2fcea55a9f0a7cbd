/**
 * @file cli.hpp
 * @brief Command-line front end. The `omx` executable is a thin wrapper
 *        around dispatch() so the whole surface is testable in-process.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace omx::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;

// args excludes the program name. Results go to `out` unless --out is
// given; diagnostics and usage go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Directory searched by --fixture: $OMX_FIXTURE_DIR, else the build-time default.
std::string fixture_dir();

std::string version();

} // namespace omx::cli
