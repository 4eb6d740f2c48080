#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tbeam/config_io.hpp"

namespace tbeam::cli {

// Exit codes shared by all commands.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 2;
inline constexpr int kNonConvergence = 3;
inline constexpr int kVerificationFailure = 4;

int cmd_gains(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg, const std::string& gains_path = "");
int cmd_sweep(const RunConfig& cfg, const std::vector<std::pair<double, double>>& deltas);

// Maps exceptions thrown by the commands onto the exit-code contract.
int run_guarded(const std::function<int()>& body);

}  // namespace tbeam::cli
