#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atchan/effects.hpp"

namespace atchan::cli {

enum class Format { Text, Json };

/// 0: everything consistent or passing. 1: an inconsistency or violation.
/// 2: unverified items remain. 3: usage or parse error.
enum ExitCode : int { kPass = 0, kFound = 1, kUnverified = 2, kUsage = 3 };

struct Options {
  std::string command;    // check, attr, mitigate, project, scenarios
  std::string attribute;  // attr only
  std::vector<std::string> files;
  Format format = Format::Text;
  std::optional<std::string> dot_dir;
  std::size_t max_search = kDefaultSearchCap;
  std::uint64_t seed = 0;
  bool strict = false;
  bool color = false;
};

inline constexpr const char* kReportSchema = "atchan.report/1";

/// `auto` colors when `tty` is set. Unknown values count as `auto`.
bool use_color(const char* env_value, bool tty);

/// Runs one command over every file, sorted by path, and writes the report
/// to `out`. Returns the exit code.
int run(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace atchan::cli
