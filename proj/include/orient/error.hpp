#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orient {

enum class ErrorKind {
    invalid_input,
    invalid_config,
    invalid_label,
    degenerate_vector,
    degenerate_prediction,
    empty_votes,
    empty_dataset,
    convergence_failure,
    divergence,
    parse_error,
    format_error,
    io_error,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure the library reports is an orient::Error; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown when no mean-shift start converged; carries the best iterate seen.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(double best_degrees, double best_density)
        : Error(ErrorKind::convergence_failure, "mean-shift did not converge from any start"),
          best_degrees_(best_degrees), best_density_(best_density) {}

    double best_degrees() const noexcept { return best_degrees_; }
    double best_density() const noexcept { return best_density_; }

private:
    double best_degrees_;
    double best_density_;
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(std::size_t iteration)
        : Error(ErrorKind::divergence,
                "non-finite training loss at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message,
               ErrorKind kind = ErrorKind::parse_error)
        : Error(kind, "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace orient
