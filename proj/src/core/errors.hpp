#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lagedge {

// Error categories; values match the le_status codes of the C API.
enum class ErrorCode : int {
    invalid_argument = 1,
    numerical = 2,
    io = 3,
    verify_failed = 4,
    internal = 5,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string msg)
        : std::runtime_error(std::move(msg)), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

class InvalidArgumentError : public Error {
  public:
    explicit InvalidArgumentError(std::string msg)
        : Error(ErrorCode::invalid_argument, std::move(msg)) {}
};

// Guard trips, shift-inside-support, eigensolver non-convergence. Carries the
// recursion index when one is meaningful (0 otherwise).
class NumericalError : public Error {
  public:
    explicit NumericalError(std::string msg, std::int64_t index = 0)
        : Error(ErrorCode::numerical, std::move(msg)), index_(index) {}
    std::int64_t index() const noexcept { return index_; }

  private:
    std::int64_t index_;
};

class IoError : public Error {
  public:
    explicit IoError(std::string msg) : Error(ErrorCode::io, std::move(msg)) {}
};

}  // namespace lagedge
