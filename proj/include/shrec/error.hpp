#pragma once

#include <stdexcept>
#include <string>

namespace shrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input files that do not match the expected format.
struct ParseError : Error {
    using Error::Error;
};

// Referencing an entity that is not part of the corpus or scenario.
struct LookupError : Error {
    using Error::Error;
};

// Inputs that violate a documented precondition or invariant.
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace shrec
