#include "cyber/core/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace cyber {

namespace {

std::atomic<unsigned> configured_threads{0};

unsigned default_threads()
{
    if (const char* env = std::getenv("CYBERRISK_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_thread_count(unsigned threads) { configured_threads = threads; }

unsigned thread_count()
{
    const unsigned t = configured_threads.load();
    return t == 0 ? default_threads() : t;
}

}  // namespace cyber
