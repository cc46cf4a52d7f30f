#pragma once

#include <stdexcept>
#include <string>

namespace shelab {

/// Base of every error raised by the library. `kind()` is a stable token
/// used by the CLI when it maps failures to exit codes and messages.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SHELAB_DEFINE_ERROR(Name, token)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(token, what) {}         \
  };

SHELAB_DEFINE_ERROR(DomainError, "domain-error")
SHELAB_DEFINE_ERROR(RangeError, "range-error")
SHELAB_DEFINE_ERROR(PreconditionError, "precondition-error")
SHELAB_DEFINE_ERROR(ParameterError, "parameter-error")
SHELAB_DEFINE_ERROR(InversionError, "inversion-error")
SHELAB_DEFINE_ERROR(InsufficientDataError, "insufficient-data")
SHELAB_DEFINE_ERROR(SpecError, "spec-error")
SHELAB_DEFINE_ERROR(ConfigError, "config-error")
SHELAB_DEFINE_ERROR(ResourceError, "resource-error")

#undef SHELAB_DEFINE_ERROR

/// Raised by convexity checks when h'(u) vanishes; carries the offending u.
class SingularPointError : public Error {
 public:
  SingularPointError(double u, const std::string& what)
      : Error("singular-point-error", what), u_(u) {}
  double point() const noexcept { return u_; }

 private:
  double u_;
};

}  // namespace shelab
