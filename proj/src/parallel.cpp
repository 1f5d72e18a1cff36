#include "rnforge/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rnforge {

unsigned workers_from_env(unsigned fallback) {
  const char* v = std::getenv("RNFORGE_WORKERS");
  if (!v || !*v) return fallback;
  try {
    const unsigned long n = std::stoul(v);
    return n == 0 ? fallback : static_cast<unsigned>(n);
  } catch (const std::exception&) {
    return fallback;
  }
}

}  // namespace rnforge
