#pragma once

#include <stdexcept>

namespace salca {

// Bad arguments, malformed parameter combinations, out-of-range requests.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values where finite math is required.
struct NumericError : ParamError {
    using ParamError::ParamError;
};

// Filesystem and serialization failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Payload does not match what its header promised.
struct CorruptFileError : IoError {
    using IoError::IoError;
};

// Unknown dtype, unsupported version, or malformed header.
struct FormatError : IoError {
    using IoError::IoError;
};

// Design-point search has no feasible solution.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace salca
