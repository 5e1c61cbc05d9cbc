#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "numeric.hpp"

namespace fflab {

/// Shared evaluation budget; charging past the limit throws BudgetExceeded.
class Budget {
public:
    explicit Budget(std::uint64_t limit = 1'000'000'000) : limit_(limit) {}
    Budget(const Budget&) = delete;
    Budget& operator=(const Budget&) = delete;

    void charge(std::uint64_t units) {
        const std::uint64_t before = used_.fetch_add(units, std::memory_order_relaxed);
        if (before + units > limit_) {
            exhausted_.store(true, std::memory_order_relaxed);
            throw BudgetExceeded("evaluation budget of " + std::to_string(limit_) + " exhausted");
        }
    }
    /// Refuses work up front when `units` cannot fit.
    void require(std::uint64_t units, const std::string& what) const {
        if (units > limit_ - std::min(limit_, used())) throw BudgetExceeded(what + " needs " + std::to_string(units) + " evaluations, budget " + std::to_string(limit_));
    }
    std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }
    std::uint64_t limit() const { return limit_; }
    bool exhausted() const { return exhausted_.load(std::memory_order_relaxed); }

private:
    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
    std::atomic<bool> exhausted_{false};
};

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Evaluates body(i) for i in [0, count) on `workers` threads and folds the
/// results in index order, so the answer never depends on scheduling.
template <class T, class Body, class Combine>
T parallel_reduce(std::uint64_t count, unsigned workers, T init, Body body, Combine combine) {
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) init = combine(std::move(init), body(i));
        return init;
    }
    std::vector<T> results(count);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<bool> stop{false};
    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::uint64_t>(workers, count); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    for (auto& r : results) init = combine(std::move(init), std::move(r));
    return init;
}

}  // namespace fflab
