#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "dyon/field.hpp"

namespace dyon {

enum class ErrorKind {
    Domain,
    SingularRadius,
    InterpolationOutOfRange,
    IntegratorStall,
    InvalidBracket,
    BracketNotFound,
    GridMismatch,
    NotConverged,
    SingularJacobian,
    InvalidGrid,
    PreconditionViolation,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<Field> field = std::nullopt)
        : std::runtime_error(message), kind_(kind), field_(field) {}

    ErrorKind kind() const { return kind_; }
    std::optional<Field> field() const { return field_; }

private:
    ErrorKind kind_;
    std::optional<Field> field_;
};

}  // namespace dyon
