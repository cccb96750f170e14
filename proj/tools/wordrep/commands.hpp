#pragma once

#include <string>

#include <json.hpp>

namespace wordrep::cli {

// Runs one fully resolved command config; returns the process exit code.
// Every command writes a resolved-config snapshot next to its primary output
// so the run can be replayed byte-for-byte.
int run_command(nlohmann::json config);

// ${NAME} expansion so configs can point at environment-provided paths.
std::string expand_env(const std::string& value);

// Exit codes, one per error class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitParse = 65;
inline constexpr int kExitProtocol = 66;
inline constexpr int kExitNumerical = 67;
inline constexpr int kExitInternal = 70;

}  // namespace wordrep::cli
