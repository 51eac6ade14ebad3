#include "anivar/parallel.hpp"

#include <atomic>

namespace anivar {

namespace {
std::atomic<unsigned> configured{0};
}

void set_thread_count(unsigned n)
{
    configured = n;
}

unsigned thread_count()
{
    unsigned n = configured.load();
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

}  // namespace anivar
