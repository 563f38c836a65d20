#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace lcl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };
struct TooLargeError : Error { using Error::Error; };
struct DivisionError : Error { using Error::Error; };
struct EmptyError : Error { using Error::Error; };
struct PeriodError : Error { using Error::Error; };
struct AmbiguityError : Error {
    AmbiguityError(const std::string& what, double defect_norm)
        : Error(what), defect(defect_norm) {}
    double defect;
};
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double best)
        : Error(what), best_residual(best) {}
    double best_residual;
};
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t where)
        : Error(what + " at position " + std::to_string(where)), pos(where) {}
    std::size_t pos;
};
struct TimeoutError : Error { using Error::Error; };

// Cooperative deadline, per thread. Long loops call check_deadline().
namespace detail {
inline thread_local std::chrono::steady_clock::time_point deadline =
    std::chrono::steady_clock::time_point::max();
}

inline void set_deadline(double seconds) {
    using namespace std::chrono;
    if (seconds <= 0) {
        detail::deadline = steady_clock::time_point::max();
        return;
    }
    detail::deadline = steady_clock::now() +
                       duration_cast<steady_clock::duration>(duration<double>(seconds));
}

inline void clear_deadline() { detail::deadline = std::chrono::steady_clock::time_point::max(); }

inline void check_deadline() {
    if (std::chrono::steady_clock::now() > detail::deadline) throw TimeoutError("time limit exceeded");
}

} // namespace lcl
