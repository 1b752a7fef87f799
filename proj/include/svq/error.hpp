#pragma once

#include <stdexcept>
#include <string>

namespace svq {

// Precondition or argument violations: bad sizes, out-of-range indices,
// mismatched dimensions, broken table invariants.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public ContractError {
public:
    using ContractError::ContractError;
};

// A zero-norm weight where a unit direction is required.
class DegenerateCodebookError : public ContractError {
public:
    using ContractError::ContractError;
};

// Objective or gradient became non-finite during training.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed persisted data (codebook files, dataset CSVs). Bad config text is a ContractError.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace svq
