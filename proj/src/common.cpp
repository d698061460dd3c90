#include "gcalc/common.hpp"

#include <algorithm>
#include <mutex>

namespace gcalc {

namespace {
std::atomic<int> g_max_workers{0};  // 0 = not set, use hardware concurrency
}

int max_workers() {
    int n = g_max_workers.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_max_workers(int n) { g_max_workers.store(std::max(0, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(max_workers()), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    // Chunk size depends on n only; threads pull chunks dynamically.
    const std::size_t chunk = std::max<std::size_t>(1, n / (4 * static_cast<std::size_t>(workers)) + 1);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    auto run = [&] {
        try {
            for (;;) {
                if (failed.load(std::memory_order_relaxed)) break;
                std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) break;
                body(begin, std::min(n, begin + chunk));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    const std::size_t n = xs.size();
    if (n == 0) return r;
    r.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n == 1) return r;
    std::vector<double> dev2(n);
    for (std::size_t i = 0; i < n; ++i) dev2[i] = sqr(xs[i] - r.mean);
    const double var = pairwise_sum(dev2) / static_cast<double>(n - 1);
    r.se = std::sqrt(var / static_cast<double>(n));
    return r;
}

}  // namespace gcalc
