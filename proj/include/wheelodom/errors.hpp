#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wheelodom {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or inputs that violate a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// File could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

// Operation requires at least one input element.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// A per-step wheel travel exceeded the configured sanity bound. Indicates
// log corruption rather than plausible motion; never integrated silently.
class StepTooLargeError : public Error {
public:
    StepTooLargeError(double d_left_m, double d_right_m, double bound_m, std::size_t step_index)
        : Error("wheel travel step too large at step " + std::to_string(step_index) +
                ": d_left=" + std::to_string(d_left_m) + " m, d_right=" +
                std::to_string(d_right_m) + " m, bound=" + std::to_string(bound_m) + " m"),
          d_left_m_(d_left_m),
          d_right_m_(d_right_m),
          bound_m_(bound_m),
          step_index_(step_index) {}

    double d_left_m() const { return d_left_m_; }
    double d_right_m() const { return d_right_m_; }
    double bound_m() const { return bound_m_; }
    std::size_t step_index() const { return step_index_; }

private:
    double d_left_m_;
    double d_right_m_;
    double bound_m_;
    std::size_t step_index_;
};

// Circle fit attempted on collinear or otherwise degenerate points.
class FitDegenerateError : public Error {
public:
    using Error::Error;
};

// Both quadrature channels flipped between consecutive samples, which a real
// decoder cannot order. Signals a missed sample or an electrical glitch.
class IllegalTransitionError : public Error {
public:
    explicit IllegalTransitionError(std::size_t sample_index)
        : Error("illegal quadrature transition (both channels changed) at sample " +
                std::to_string(sample_index)),
          sample_index_(sample_index) {}

    std::size_t sample_index() const { return sample_index_; }

private:
    std::size_t sample_index_;
};

// Requested quadrature signal sampling is too coarse to represent the
// commanded motion without emitting illegal transitions.
class AliasingError : public Error {
public:
    using Error::Error;
};

}  // namespace wheelodom
