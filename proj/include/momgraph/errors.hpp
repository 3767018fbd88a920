#pragma once

#include <stdexcept>
#include <string>

namespace momgraph {

// Every error raised by the library derives from Error and carries the
// process exit code the CLI reports for it.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code)
        : std::runtime_error(what), exit_code_(exit_code) {}

    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Exit code 2: malformed or invalid input.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what, 2) {}
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class SelfLoopError : public InputError {
public:
    using InputError::InputError;
};

class InvalidModelError : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class CapabilityError : public InputError {
public:
    using InputError::InputError;
};

class AlignmentError : public InputError {
public:
    using InputError::InputError;
};

// Exit code 3: numerical failure or non-identifiable input.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what, 3) {}
};

class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NormalizationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllPosedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AtomSeparationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IdentifiabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StageInconsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Exit code 4: a configured work budget was exceeded.
class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(what, 4) {}
};

}  // namespace momgraph
