#pragma once

#include <stdexcept>
#include <string>

namespace tessera {

// Base class for all tessera failures. The CLI maps subclasses to exit
// codes: ConfigError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad usage, unreadable or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input data failed validation (parse failures, duplicates, missing cells).
class DataError : public Error {
public:
    using Error::Error;
};

// Degenerate or infeasible numeric situations.
class NumericError : public Error {
public:
    using Error::Error;
};

// A variable whose sample range has zero width cannot be range-scaled. A
// constant variable carries no clustering information, so this is a hard
// error rather than a silent map-to-zero.
class DegenerateRangeError : public NumericError {
public:
    explicit DegenerateRangeError(std::string variable)
        : NumericError("degenerate range: variable '" + variable
                       + "' is constant across the sample"),
          variable_(std::move(variable)) {}

    const std::string& variable() const noexcept { return variable_; }

private:
    std::string variable_;
};

} // namespace tessera
