#include "gibbsgraph/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gibbsgraph {
namespace {

std::atomic<std::size_t> g_override{0};

std::size_t from_environment() {
  if (const char* env = std::getenv("GIBBSGRAPH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load();
  return o > 0 ? o : from_environment();
}

void set_thread_count(std::size_t threads) { g_override = threads; }

namespace detail {
bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace detail

}  // namespace gibbsgraph
