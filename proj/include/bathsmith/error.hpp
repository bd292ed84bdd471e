// error.hpp - Exception hierarchy shared by all modules
//
// The CLI maps these onto exit codes: ConfigError -> 2, ParseError and
// ValidationError -> 3, NumericError and FitError -> 4.

#pragma once

#include <stdexcept>
#include <string>

namespace bathsmith {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document; carries the offending field and line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string field = {}, int line = 0)
        : Error(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Every multi-start failed; best_residual is the lowest objective seen.
class FitError : public NumericError {
public:
    FitError(const std::string& what, double best_residual)
        : NumericError(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

} // namespace bathsmith
