#pragma once

#include <string>
#include <string_view>

namespace frictionlab::log {

enum class Level { quiet, warn, info };

void set_level(Level level);
Level level();

void warn(std::string_view message);
// Emits `message` only the first time `key` is seen in this process.
void warn_once(std::string_view key, std::string_view message);
void info(std::string_view message);

}  // namespace frictionlab::log
