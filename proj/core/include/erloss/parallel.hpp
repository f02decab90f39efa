#pragma once

#include <cstdlib>
#include <thread>

namespace erloss {

// Worker cap for parallel reductions: the REPL_THREADS environment variable
// when set to a positive integer, otherwise the hardware concurrency
// (at least 1 either way).
inline int worker_count() {
  if (const char* env = std::getenv("REPL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace erloss
