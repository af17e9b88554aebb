#include "magstep/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace magstep {

namespace {

int threads_from_env() {
  if (const char* s = std::getenv("MAGSTEP_THREADS")) {
    try {
      int n = std::stoi(s);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{threads_from_env()};
  return n;
}

}  // namespace

int default_threads() { return thread_setting().load(); }

void set_default_threads(int n) { thread_setting().store(n > 0 ? n : threads_from_env()); }

}  // namespace magstep
