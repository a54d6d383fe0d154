#ifndef MASSES_ERROR_HPP
#define MASSES_ERROR_HPP

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace masses {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kInput = 2,
  kIdResolution = 3,
  kInvariant = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Unreadable file, malformed record, bad flag value.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::kInput, what) {}
};

/// Predictions and annotations that do not line up by question id.
class IdResolutionError : public Error {
 public:
  explicit IdResolutionError(const std::string& what)
      : Error(ExitCode::kIdResolution, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ExitCode::kInvariant, what) {}
};

/// Raised when a pattern has too few annotations for the requested score.
class DegeneratePatternError : public InvariantError {
 public:
  explicit DegeneratePatternError(const std::string& what) : InvariantError(what) {}
};

namespace log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Verbosity comes from MASSES_LOG (error|warn|info|debug); default warn.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("MASSES_LOG");
    if (env == nullptr) return Level::kWarn;
    std::string_view v(env);
    if (v == "error") return Level::kError;
    if (v == "info") return Level::kInfo;
    if (v == "debug") return Level::kDebug;
    return Level::kWarn;
  }();
  return level;
}

inline void write(Level level, std::string_view msg) {
  if (level > threshold()) return;
  static constexpr const char* kTags[] = {"error", "warn", "info", "debug"};
  std::cerr << "[masses:" << kTags[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void warn(std::string_view msg) { write(Level::kWarn, msg); }
inline void info(std::string_view msg) { write(Level::kInfo, msg); }
inline void debug(std::string_view msg) { write(Level::kDebug, msg); }

}  // namespace log
}  // namespace masses

#endif  // MASSES_ERROR_HPP
