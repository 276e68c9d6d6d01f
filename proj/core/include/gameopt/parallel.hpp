#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace gameopt {

/// Runs body(i) for i in [0, count) on up to `jobs` threads with static
/// contiguous chunks. The body must only write to slots owned by index i;
/// the first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            threads.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation in a fixed association order.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Sample mean with its CLT standard error.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Mean and standard error computed from deviations about the first sample,
/// so that identical samples give their common value and a zero error exactly.
inline Estimate summarize(std::span<const double> samples) {
    Estimate e;
    e.count = samples.size();
    if (samples.empty()) return e;
    const double shift = samples.front();
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = samples[i] - shift;
    const double n = static_cast<double>(samples.size());
    const double mean_dev = pairwise_sum(dev) / n;
    e.mean = shift + mean_dev;
    if (samples.size() < 2) return e;
    for (auto& v : dev) v = (v - mean_dev) * (v - mean_dev);
    const double var = pairwise_sum(dev) / (n - 1.0);
    e.std_error = std::sqrt(var / n);
    return e;
}

}  // namespace gameopt
