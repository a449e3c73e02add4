#pragma once

#include <string>

#include "betacut/reward_spec.hpp"

namespace betacut {

/// JSON shape: {"constant": C, "linear": a, "bernoulli": {"p": p, "e": E}}.
/// Absent keys mean an absent (zero) component; "bernoulli" may also be an
/// array of {p, e} objects when there are several bonus sources.
std::string to_json(const RewardSpec& spec);
RewardSpec reward_spec_from_json(const std::string& text);

}  // namespace betacut
