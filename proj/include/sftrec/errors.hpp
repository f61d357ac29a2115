#pragma once

#include <stdexcept>
#include <string>

namespace sftrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user data; the CLI maps these to exit code 2.
struct InvalidInput : Error {
    using Error::Error;
};

struct TableMismatch : Error {
    TableMismatch() : Error("operands use different variable tables") {}
};

struct TruncationOverflow : Error {
    using Error::Error;
};

struct UnknownVariable : Error {
    explicit UnknownVariable(const std::string& id) : Error("unknown variable '" + id + "'") {}
};

struct DegreeUndeclared : Error {
    DegreeUndeclared() : Error("linear map has no declared degree") {}
};

} // namespace sftrec
