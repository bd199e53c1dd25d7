#pragma once

#include <stdexcept>
#include <string>

namespace vinedist {

// Error categories. The CLI maps Numeric to exit code 2 and everything
// else to exit code 1.
enum class ErrorKind {
    Domain,      // argument outside its mathematical domain
    Shape,       // dimension / size mismatch
    Contract,    // precondition between objects violated (e.g. diagonal mismatch)
    Parse,       // malformed input document
    Validation,  // structure matrix property violated
    Structural,  // inconsistent vine internals (signals a bug or invalid spec)
    Refusal,     // soft limit exceeded without override
    Numeric      // quadrature / iteration failed to converge
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Structural: return "structural";
        case ErrorKind::Refusal: return "refusal";
        case ErrorKind::Numeric: return "numeric";
    }
    return "unknown";
}

[[noreturn]] inline void throw_domain(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }
[[noreturn]] inline void throw_shape(const std::string& msg) { throw Error(ErrorKind::Shape, msg); }
[[noreturn]] inline void throw_contract(const std::string& msg) { throw Error(ErrorKind::Contract, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }

}  // namespace vinedist
