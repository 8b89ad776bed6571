#pragma once

#include <stdexcept>
#include <string>

namespace sb {

enum class ErrorCode {
    InvalidArgument,
    DomainError,
    OrderUnsupported,
    DivergentSeminorm,
    DivergentNorm,
    AccuracyNotReached,
    ConsistencyError,
    OrderingError,
    DataError,
    ParseError,
    IoError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// Quadrature failure that still carries the best estimate reached.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double best_estimate, double error_estimate)
        : Error(ErrorCode::AccuracyNotReached, what),
          best_estimate_(best_estimate),
          error_estimate_(error_estimate) {}
    double best_estimate() const { return best_estimate_; }
    double error_estimate() const { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

}  // namespace sb
