#include "netmf/errors.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace netmf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

namespace {
std::atomic<bool> g_warnings{true};
std::mutex g_warn_mutex;
}  // namespace

void warn(const std::string& message) {
  if (!g_warnings.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  std::cerr << "netmf: warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) noexcept { g_warnings.store(enabled); }

}  // namespace netmf
