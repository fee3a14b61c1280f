#pragma once

#include <cstdarg>

namespace cp3d::log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Current level; initialized from the CROWDPOSE3D_LOG environment variable
/// (error|warn|info|debug), default warn.
Level level();
void set_level(Level level);

void write(Level level, const char* fmt, ...);

}  // namespace cp3d::log

#define CP3D_LOG_ERROR(...) ::cp3d::log::write(::cp3d::log::Level::kError, __VA_ARGS__)
#define CP3D_LOG_WARN(...) ::cp3d::log::write(::cp3d::log::Level::kWarn, __VA_ARGS__)
#define CP3D_LOG_INFO(...) ::cp3d::log::write(::cp3d::log::Level::kInfo, __VA_ARGS__)
#define CP3D_LOG_DEBUG(...) ::cp3d::log::write(::cp3d::log::Level::kDebug, __VA_ARGS__)
