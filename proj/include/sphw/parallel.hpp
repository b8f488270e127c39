#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sphw {

/// Persistent worker pool running static contiguous partitions of an index
/// range. Every index is owned by exactly one worker, so callers that write
/// only to per-index outputs get results independent of the worker count.
class ThreadPool {
public:
    explicit ThreadPool(int threads) : size_(std::max(1, threads)) {
        for (int w = 1; w < size_; ++w) workers_.emplace_back([this, w] { worker_loop(w); });
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    ~ThreadPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : workers_) t.join();
    }

    int size() const noexcept { return size_; }

    /// Calls body(begin, end) on disjoint chunks covering [0, n).
    void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
        if (n == 0) return;
        // Nested calls from inside a running partition execute inline.
        if (size_ == 1 || inside_ || n < 2 * static_cast<std::size_t>(size_)) {
            body(0, n);
            return;
        }
        std::unique_lock lock(mutex_);
        body_ = &body;
        count_ = n;
        pending_ = size_ - 1;
        ++generation_;
        lock.unlock();
        wake_.notify_all();

        std::exception_ptr mine;
        inside_ = true;
        try {
            run_chunk(0);
        } catch (...) {
            mine = std::current_exception();
        }
        inside_ = false;

        lock.lock();
        done_.wait(lock, [this] { return pending_ == 0; });
        body_ = nullptr;
        auto err = error_ ? error_ : mine;
        error_ = nullptr;
        lock.unlock();
        if (err) std::rethrow_exception(err);
    }

private:
    void run_chunk(int w) {
        const std::size_t chunk = (count_ + size_ - 1) / size_;
        const std::size_t begin = std::min(count_, chunk * static_cast<std::size_t>(w));
        const std::size_t end = std::min(count_, begin + chunk);
        if (begin < end) (*body_)(begin, end);
    }

    void worker_loop(int w) {
        inside_ = true;
        unsigned long seen = 0;
        for (;;) {
            std::unique_lock lock(mutex_);
            wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            lock.unlock();
            std::exception_ptr err;
            try {
                run_chunk(w);
            } catch (...) {
                err = std::current_exception();
            }
            lock.lock();
            if (err && !error_) error_ = err;
            if (--pending_ == 0) done_.notify_one();
        }
    }

    int size_;
    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
    std::size_t count_ = 0;
    int pending_ = 0;
    unsigned long generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
    static inline thread_local bool inside_ = false;
};

namespace detail {

inline int default_thread_count() {
    if (const char* env = std::getenv("SPHW_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

inline std::unique_ptr<ThreadPool>& pool_slot() {
    static std::unique_ptr<ThreadPool> pool;
    return pool;
}

}  // namespace detail

/// Sets the number of workers used by parallel_for. Not thread-safe; call
/// between computations.
inline void set_thread_count(int threads) {
    detail::pool_slot() = std::make_unique<ThreadPool>(threads);
}

inline ThreadPool& global_pool() {
    auto& slot = detail::pool_slot();
    if (!slot) slot = std::make_unique<ThreadPool>(detail::default_thread_count());
    return *slot;
}

inline int thread_count() { return global_pool().size(); }

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::function<void(std::size_t, std::size_t)> body = [&fn](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    };
    global_pool().run(n, body);
}

}  // namespace sphw
