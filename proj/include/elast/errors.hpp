#pragma once

#include <stdexcept>
#include <string>

namespace elast {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonManifoldError : Error { using Error::Error; };
struct UnsupportedDegreeError : Error { using Error::Error; };
struct UnsupportedOrderError : Error { using Error::Error; };
struct SingularLocalSystemError : Error { using Error::Error; };
struct WrongSpaceError : Error { using Error::Error; };
struct NotPositiveDefiniteError : Error { using Error::Error; };
struct NoConvergenceError : Error { using Error::Error; };
struct CoercivityWarning : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SchemaMismatchError : Error { using Error::Error; };
struct DegenerateErrorValue : Error { using Error::Error; };

} // namespace elast
