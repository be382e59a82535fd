#pragma once

#include <stdexcept>
#include <string>

namespace levq {

enum class ErrorKind {
    invalid_argument,   // malformed model parameters or config
    unstable,           // stability condition violated
    unsupported,        // configuration outside what a method can handle
    domain,             // argument outside the admissible domain
    singularity,        // evaluation too close to a zero of the kernel
    numerical_failure,  // iteration or quadrature did not reach tolerance
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable category. The CLI maps the
/// category onto its exit-code contract.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace levq
