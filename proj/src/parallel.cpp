#include "pftube/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace pftube {

int thread_limit() { return omp_get_max_threads(); }

void set_thread_limit(int threads) {
  if (threads < 1) threads = omp_get_num_procs();
  omp_set_num_threads(threads);
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("TOOL_THREADS")) {
    try {
      set_thread_limit(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable value: keep the default
    }
  }
  return thread_limit();
}

}  // namespace pftube
