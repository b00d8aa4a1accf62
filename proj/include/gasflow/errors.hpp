#pragma once

#include <stdexcept>
#include <string>

namespace gasflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of a model function (p <= 0, overflow, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration (scales, geometry, options).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Base for failures raised while integrating a single pipe. The solver
/// attaches the pipe id before rethrowing so callers can locate the edge.
class PipeIntegrationError : public Error {
public:
    explicit PipeIntegrationError(std::string message)
        : Error(message), message_(std::move(message)) {}

    const char* what() const noexcept override { return message_.c_str(); }

    const std::string& pipe_id() const noexcept { return pipe_id_; }

    void attach_pipe(const std::string& id) {
        if (!pipe_id_.empty()) {
            return;
        }
        pipe_id_ = id;
        message_ = "pipe '" + id + "': " + message_;
    }

private:
    std::string message_;
    std::string pipe_id_;
};

/// The momentum denominator rho^2 - R1 f^2 rho'(p) vanished (sonic transition).
class ChokedFlow : public PipeIntegrationError {
public:
    using PipeIntegrationError::PipeIntegrationError;
};

class NonPhysicalPressure : public PipeIntegrationError {
public:
    using PipeIntegrationError::PipeIntegrationError;
};

class StiffnessBudgetExceeded : public PipeIntegrationError {
public:
    using PipeIntegrationError::PipeIntegrationError;
};

/// A logarithm in a closed-form first integral received a non-positive argument.
class BranchViolation : public Error {
public:
    using Error::Error;
};

class NoBracket : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, int line, const std::string& field, const std::string& message)
        : Error(format(source, line, field, message)), line_(line), field_(field) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& source, int line, const std::string& field,
                              const std::string& message) {
        std::string out = source;
        if (line > 0) {
            out += ":" + std::to_string(line);
        }
        if (!field.empty()) {
            out += " [" + field + "]";
        }
        return out + ": " + message;
    }

    int line_;
    std::string field_;
};

}  // namespace gasflow
