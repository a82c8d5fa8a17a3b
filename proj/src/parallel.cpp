#include "sbl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace sbl {

namespace {

constexpr std::size_t kChunk = 4096;

int read_thread_cap() {
    const char* env = std::getenv("SBL_THREADS");
    if (env == nullptr) return 0;
    char* end = nullptr;
    long value = std::strtol(env, &end, 10);
    if (end == env || value < 1) return 0;
    return static_cast<int>(std::min<long>(value, 256));
}

} // namespace

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int cap = read_thread_cap();
    return cap > 0 ? std::min(hw, cap) : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
    int workers = std::min<int>(worker_count(), static_cast<int>(n_chunks));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next_chunk{0};
    auto run = [&] {
        for (;;) {
            std::size_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            const std::size_t begin = c * kChunk;
            const std::size_t end = std::min(begin + kChunk, count);
            for (std::size_t i = begin; i < end; ++i) body(i);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> deterministic_accumulate(
    std::size_t count, std::size_t components,
    const std::function<void(std::size_t, double*)>& fill) {
    const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
    // chunk-major partials: partial[c * components + k]
    std::vector<double> partials(std::max<std::size_t>(n_chunks, 1) * components, 0.0);

    auto reduce_chunk = [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(begin + kChunk, count);
        const std::size_t len = end - begin;
        std::vector<double> buffer(len * components);
        for (std::size_t i = 0; i < len; ++i) fill(begin + i, buffer.data() + i * components);
        // column-wise pairwise sum within the chunk
        std::vector<double> column(len);
        for (std::size_t k = 0; k < components; ++k) {
            for (std::size_t i = 0; i < len; ++i) column[i] = buffer[i * components + k];
            partials[c * components + k] = pairwise_sum(column);
        }
    };

    if (n_chunks <= 1) {
        if (count > 0) reduce_chunk(0);
    } else {
        std::atomic<std::size_t> next{0};
        int workers = std::min<int>(worker_count(), static_cast<int>(n_chunks));
        auto run = [&] {
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                reduce_chunk(c);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < workers; ++t) pool.emplace_back(run);
        run();
        for (auto& th : pool) th.join();
    }

    std::vector<double> totals(components, 0.0);
    std::vector<double> column(n_chunks);
    for (std::size_t k = 0; k < components; ++k) {
        for (std::size_t c = 0; c < n_chunks; ++c) column[c] = partials[c * components + k];
        totals[k] = pairwise_sum(column);
    }
    return totals;
}

} // namespace sbl
