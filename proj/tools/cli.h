// The tabproc command line: parse, encode, analyze, stats and clip.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tabproc/token_codec.h"

namespace tabproc::cli {

enum class LogLevel { quiet, info, debug };

struct RunConfig {
  std::vector<std::string> inputPaths;
  std::filesystem::path outputDir = ".";
  TokenMode tokenMode = TokenMode::pitchOctave;
  std::optional<std::filesystem::path> techniqueDictPath;
  bool mergeTracks = false;
  int maxFret = kMaxFret;
  int workers = 1;
  LogLevel logLevel = LogLevel::info;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitFatal = 2;

/// Runs one command line (args exclude the program name). Data goes to
/// files under --out; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tabproc::cli
