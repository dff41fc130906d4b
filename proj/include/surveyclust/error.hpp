#pragma once

#include <stdexcept>
#include <string>

namespace surveyclust {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed schema, config or generator spec content.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed data files (header mismatch, duplicate ids, bad model files).
class ParseError : public Error {
public:
    using Error::Error;
};

// Missing, unreadable or unwritable files.
class IoError : public Error {
public:
    using Error::Error;
};

// An operation was called outside its preconditions (k > n, alpha out of range, ...).
class InputError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace surveyclust
