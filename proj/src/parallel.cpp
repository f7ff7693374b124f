#include <spopo/parallel.hpp>

#include <cstdlib>
#include <string>

namespace spopo {

unsigned default_thread_count()
{
    if (const char* env = std::getenv("SPOPO_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace spopo
