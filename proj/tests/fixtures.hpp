#pragma once

#include "omx/params.hpp"

#include <cmath>
#include <string>

namespace omx::testing {

inline RawConfig raw_fixture(const std::string& name)
{
    return load_config(std::string(OMX_FIXTURE_DIR) + "/" + name + ".json");
}

inline OmParams fixture(const std::string& name)
{
    return derive_rates(raw_fixture(name));
}

inline double rel_err(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

} // namespace omx::testing
