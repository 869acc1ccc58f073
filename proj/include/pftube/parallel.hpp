#pragma once

namespace pftube {

/// Number of OpenMP threads library kernels will use.
int thread_limit();

/// Caps internal parallelism. Values < 1 reset to the number of available cores.
void set_thread_limit(int threads);

/// Applies the TOOL_THREADS environment variable, if set and valid.
/// Returns the resulting limit.
int configure_threads_from_env();

}  // namespace pftube
