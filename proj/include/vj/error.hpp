#pragma once

#include <stdexcept>
#include <string>

namespace vj {

// Error taxonomy shared by the whole library. Every subclass carries a
// human-readable message; the C API maps the dynamic type to a status code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file or stream. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = 0)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ArgError : public Error {
public:
    using Error::Error;
};

// Rectangle or window outside its reference frame.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Task graph is not a DAG or references unknown ids.
class GraphError : public Error {
public:
    using Error::Error;
};

class TrainError : public Error {
public:
    using Error::Error;
};

} // namespace vj
