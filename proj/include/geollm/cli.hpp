#pragma once

#include <iosfwd>
#include <string>

namespace geollm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

enum class OutputMode { kHuman, kMachine };

struct CliConfig {
  std::string backend = "http";  // "http" or "scripted:<file>"
  std::string config_file;       // optional BackendConfig JSON
  std::string embedder = "hash"; // "hash" or "http"
  OutputMode mode = OutputMode::kHuman;
};

// Runs one command line. Human output and machine records go to out,
// diagnostics to err; in is read by the interactive subcommands.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             std::istream& in);

}  // namespace geollm::cli
