#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gifs/analytic.hpp"

namespace gifs::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Parses `args` (without the program name) and executes one subcommand.
/// Reports go to `out`; errors go to `err` as a single JSON line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

std::vector<std::string> demo_shape_names();

/// Throws UsageError for an unknown name.
AnalyticShapeSpec demo_shape(std::string_view name);

}  // namespace gifs::cli
