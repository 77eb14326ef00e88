#include "core/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <set>

namespace frictionlab::log {

namespace {

std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;

std::set<std::string, std::less<>>& seen_keys() {
  static std::set<std::string, std::less<>> keys;
  return keys;
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(std::string_view message) {
  if (g_level == Level::quiet) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "warning: " << message << '\n';
}

void warn_once(std::string_view key, std::string_view message) {
  {
    std::lock_guard lock(g_mutex);
    auto& keys = seen_keys();
    if (keys.find(key) != keys.end()) return;
    keys.emplace(key);
  }
  warn(message);
}

void info(std::string_view message) {
  if (g_level != Level::info) return;
  std::lock_guard lock(g_mutex);
  std::cerr << message << '\n';
}

}  // namespace frictionlab::log
