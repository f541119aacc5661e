#ifndef MOTION_CODE_ERROR_HPP
#define MOTION_CODE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace motion_code {

// Two families: input errors (bad files, bad arguments, bad shapes) and
// numerical errors (factorization failures, non-finite objectives). The CLI
// maps the first to exit code 1 and the second to exit code 2.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

struct RangeError : InputError {
  using InputError::InputError;
};

struct DomainError : InputError {
  using InputError::InputError;
};

struct ValidationError : InputError {
  using InputError::InputError;
};

struct DatasetError : InputError {
  using InputError::InputError;
};

struct ParseError : InputError {
  using InputError::InputError;
};

struct FormatError : InputError {
  using InputError::InputError;
};

struct VersionError : InputError {
  using InputError::InputError;
};

struct SplitError : InputError {
  using InputError::InputError;
};

struct LookupError : InputError {
  using InputError::InputError;
};

struct NumericalError : Error {
  using Error::Error;
};

struct SingularityError : NumericalError {
  SingularityError(const std::string &what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

} // namespace motion_code

#endif
