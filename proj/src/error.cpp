#include "levq/error.hpp"

namespace levq {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::unstable: return "unstable system";
    case ErrorKind::unsupported: return "unsupported configuration";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::numerical_failure: return "numerical failure";
    }
    return "unknown";
}

}  // namespace levq
