#pragma once

namespace exkin {

// worker-thread budget for replica runs and sweeps; honors the
// EXCHANGE_KINETICS_THREADS environment variable, else hardware concurrency
int worker_thread_cap();

}  // namespace exkin
