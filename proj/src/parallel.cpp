#include "spinchain/parallel.hpp"

#include <cstdlib>
#include <string>

namespace spinchain {

namespace {
std::atomic<std::size_t> g_override{0};

std::size_t default_workers() {
    if (const char* env = std::getenv("SPINCHAIN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}
}  // namespace

std::size_t worker_count() {
    const std::size_t o = g_override.load();
    return o > 0 ? o : default_workers();
}

void set_worker_count(std::size_t n) { g_override.store(n); }

}  // namespace spinchain
