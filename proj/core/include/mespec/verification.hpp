#pragma once

#include "mespec/run_config.hpp"
#include "mespec/serialization.hpp"

namespace mespec {

// Runs the full identity battery for the configured model: model identities,
// secular solve, eigenvector structure, evolution checks and the finite
// decreasing-level suite. Hard failures propagate as exceptions carrying the
// check name.
VerificationReport run_verification(const RunConfig& config);

}  // namespace mespec
