#pragma once

#include <exception>
#include <mutex>

namespace orient::detail {

// Holds the first exception raised inside an OpenMP loop body so it can be
// rethrown on the calling thread after the region ends.
class ExceptionSlot {
public:
    template <typename F>
    void run(F&& body) noexcept {
        try {
            body();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!first_) first_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (first_) std::rethrow_exception(first_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr first_;
};

}  // namespace orient::detail
