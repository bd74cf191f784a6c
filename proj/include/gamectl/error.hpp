#pragma once

#include <stdexcept>
#include <string>

namespace gamectl {

enum class ErrorKind {
    dimension,           // shapes of inputs disagree
    input,               // malformed file, flag or config value
    numerical,           // solver failed to converge
    integration,         // ODE step left the simplex
    degenerate_target,   // shifted pole collides with an untouched one
    uncontrollable,      // effective channel vanishes
    infeasible,          // placement system has no consistent solution
    constraint,          // K·x* constraint violated after design
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace gamectl
