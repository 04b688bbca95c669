#include "exkin/threads.hpp"

#include <cstdlib>
#include <thread>

namespace exkin {

int worker_thread_cap() {
    if (const char* env = std::getenv("EXCHANGE_KINETICS_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace exkin
