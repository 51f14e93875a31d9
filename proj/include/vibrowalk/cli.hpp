#pragma once

// Command-line front end. Every command writes its artifacts plus
// manifest.json under --out-dir; failures also write error.json there.

#include <iosfwd>
#include <string>
#include <vector>

namespace vibrowalk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitRuntime = 4;

const char* version();

/// Runs one command line (without the program name) and returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vibrowalk
