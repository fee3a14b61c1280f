#include "crowdpose3d/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cp3d::log {

namespace {

Level initial_level() {
  const char* env = std::getenv("CROWDPOSE3D_LOG");
  if (!env) return Level::kWarn;
  if (std::strcmp(env, "error") == 0) return Level::kError;
  if (std::strcmp(env, "warn") == 0) return Level::kWarn;
  if (std::strcmp(env, "info") == 0) return Level::kInfo;
  if (std::strcmp(env, "debug") == 0) return Level::kDebug;
  return Level::kWarn;
}

std::atomic<Level>& level_ref() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

const char* tag(Level level) {
  switch (level) {
    case Level::kError: return "error";
    case Level::kWarn: return "warn";
    case Level::kInfo: return "info";
    default: return "debug";
  }
}

}  // namespace

Level level() { return level_ref().load(std::memory_order_relaxed); }

void set_level(Level level) {
  level_ref().store(level, std::memory_order_relaxed);
}

void write(Level msg_level, const char* fmt, ...) {
  if (msg_level > level()) return;
  std::fprintf(stderr, "[crowdpose3d %s] ", tag(msg_level));
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace cp3d::log
