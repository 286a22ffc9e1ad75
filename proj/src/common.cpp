#include "tde/common.hpp"

#include <cstdlib>

namespace tde {

int max_threads() {
  static int cached = [] {
    const char* env = std::getenv("TDE_THREADS");
    if (!env)
      return 1;
    int n = std::atoi(env);
    return n > 0 ? n : 1;
  }();
  return cached;
}

} // namespace tde
