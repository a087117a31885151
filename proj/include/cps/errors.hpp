#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cps {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourcePos {
    int line = 0;
    int col = 0;
};

struct Diagnostic {
    SourcePos pos;
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& msg);
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

/// Raised during a run, e.g. a non-Boolean value written to a relational symbol.
class DynamicError : public Error {
public:
    explicit DynamicError(const std::string& msg, std::size_t step = 0)
        : Error(msg), step_(step) {}
    std::size_t step() const { return step_; }
    void set_step(std::size_t s) { step_ = s; }

private:
    std::size_t step_;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class NoSmallSupport : public Error {
public:
    using Error::Error;
};

class NotKSymmetric : public Error {
public:
    NotKSymmetric(const std::string& msg, std::uint32_t witness)
        : Error(msg), witness_(witness) {}
    std::uint32_t witness() const { return witness_; }

private:
    std::uint32_t witness_;
};

class NotEnoughAtoms : public Error {
public:
    using Error::Error;
};

class NoExtension : public Error {
public:
    using Error::Error;
};

class InputDependence : public Error {
public:
    using Error::Error;
};

/// Object-count cap for exponential constructions. Reads CPS_BUDGET when set.
std::size_t object_budget();

}  // namespace cps
