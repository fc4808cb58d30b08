#pragma once

#include <stdexcept>
#include <string>

namespace rnr {

/// Caller broke a precondition or handed us malformed input (CLI exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input was well-formed but the domain rejects it, e.g. a calibration with
/// overlapping segments (CLI exit code 1).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CalibrationFailed : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace rnr
