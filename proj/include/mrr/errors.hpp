#pragma once

#include <stdexcept>
#include <string>

namespace mrr {

/// Base for all toolkit errors so callers can catch one type at the CLI edge.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad argument combinations (fractions, steps, incompatible sizes).
struct ConfigError : Error {
  using Error::Error;
};

/// Inputs that are structurally valid but unusable (all-zero volume, NaNs).
struct InvalidInputError : Error {
  using Error::Error;
};

/// Malformed or truncated files; message carries the byte offset where known.
struct FormatError : Error {
  using Error::Error;
};

} // namespace mrr
