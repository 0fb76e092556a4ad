#pragma once

#include <mutex>

namespace lmpred::detail {

/// FFTW's planner is not thread-safe; every plan create/destroy takes this lock.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace lmpred::detail
