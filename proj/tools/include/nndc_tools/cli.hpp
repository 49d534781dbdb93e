#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace nndc::tools {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Runs the nndc command line. CSV and dataset output go to files or `out`
/// ("-" as output path); diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for the config hash in CSV comment lines.
std::uint64_t fnv1a(std::string_view text);

}  // namespace nndc::tools
