#include "tdlg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tdlg {

namespace {

// Fixed strip count keeps the partition independent of the worker count.
constexpr std::size_t kStrips = 64;

std::size_t env_thread_cap() {
    const char* env = std::getenv("TDLG_THREADS");
    if (!env) return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<std::size_t>(v) : 1;
}

}  // namespace

std::size_t worker_count() {
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t cap = env_thread_cap();
    return cap ? std::min(hw, cap) : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min(worker_count(), n);
    const std::size_t strips = std::min(kStrips, n);
    const std::size_t strip_len = (n + strips - 1) / strips;
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        while (true) {
            const std::size_t s = next.fetch_add(1);
            if (s >= strips) break;
            const std::size_t begin = s * strip_len;
            const std::size_t end = std::min(n, begin + strip_len);
            if (begin < end) fn(begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace tdlg
