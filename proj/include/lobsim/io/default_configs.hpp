#pragma once

#include <string_view>

#include "lobsim/validation/cross_scale.hpp"

namespace lobsim::io {

// Text of configs/ladder_<kind>.ini, compiled in so that `validate` works
// without a config file.
std::string_view default_ladder_config(validation::LadderKind kind);

} // namespace lobsim::io
