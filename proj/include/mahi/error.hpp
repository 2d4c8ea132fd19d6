#pragma once

#include <stdexcept>
#include <string>

namespace mahi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad file, bad field, bad argument.
class InputError : public Error {
public:
    using Error::Error;
};

// A computation could not produce a trustworthy number.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace mahi
