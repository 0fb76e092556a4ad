#pragma once

#include <omp.h>

#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <vector>

namespace lmpred {

/// Resolves a requested worker count: 0 means "use the OpenMP default".
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Serial reference for map_replicates: out[r] = body(r) in index order.
template <class T, class Body>
std::vector<T> map_replicates_serial(std::size_t count, Body&& body) {
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) out.push_back(body(r));
    return out;
}

/// out[r] = body(r), evaluated on an OpenMP team. Results are stored by index,
/// so the output never depends on the worker count or scheduling. If any body
/// throws, the exception from the lowest failing index is rethrown.
template <class T, class Body>
std::vector<T> map_replicates(std::size_t count, Body&& body, int threads = 0) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (long long r = 0; r < n; ++r) {
        try {
            slots[static_cast<std::size_t>(r)].emplace(body(static_cast<std::size_t>(r)));
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Pairwise summation in a fixed tree order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace lmpred
