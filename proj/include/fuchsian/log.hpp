#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace fuchsian {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from FUCHS_LOG={error|info|debug}; default error.
inline LogLevel logLevel() {
  static LogLevel level = [] {
    const char* env = std::getenv("FUCHS_LOG");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

inline void logMsg(LogLevel lvl, const std::string& msg) {
  if (lvl > logLevel()) return;
  const char* tag = lvl == LogLevel::Error ? "error" : (lvl == LogLevel::Info ? "info" : "debug");
  std::fprintf(stderr, "[fuchs:%s] %s\n", tag, msg.c_str());
}

inline void logInfo(const std::string& msg) { logMsg(LogLevel::Info, msg); }
inline void logDebug(const std::string& msg) { logMsg(LogLevel::Debug, msg); }
inline void logError(const std::string& msg) { logMsg(LogLevel::Error, msg); }

} // namespace fuchsian
