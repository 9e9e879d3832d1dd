#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace polymoments::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Mode { kRun, kCompare };
enum class Format { kJson, kCsv };

struct ExecuteOptions {
  Mode mode = Mode::kRun;
  Format format = Format::kJson;
  unsigned threads = 1;
  bool dump = false;
};

struct ExecuteResult {
  std::string output;  // the rendered artifact
  std::string dump;    // sample-level CSV, empty unless requested
};

/// 64-bit FNV-1a of the canonical (sorted-key, compact) serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Validates and runs one configuration document. Throws ConfigError (and
/// std::invalid_argument) for bad input, NumericalError for numerical failures.
/// The output never depends on `threads`.
ExecuteResult execute(const nlohmann::json& config, const ExecuteOptions& opts);

struct CommandLine {
  Mode mode = Mode::kRun;
  std::string config_path;
  std::optional<std::string> out_path;
  Format format = Format::kJson;
  std::optional<std::string> dump_path;
  unsigned threads = 1;
};

/// Reads the config, executes it and writes the artifacts. Nothing is written on
/// failure. Returns 0 on success, 2 for configuration errors, 3 for numerical errors.
int run(const CommandLine& cmd, std::ostream& out, std::ostream& err);

}  // namespace polymoments::cli
