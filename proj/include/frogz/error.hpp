#pragma once

#include <stdexcept>
#include <string>

namespace frogz {

/// A numerical routine failed to reach its accuracy target.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested combination of options is not supported by an operation.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace frogz
