#pragma once

#include <stdexcept>
#include <string>

namespace imitate {

/// Bad input to an operation (non-finite values, out-of-range indices, malformed arguments).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file or document failed validation while loading.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition between components.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration is readable but describes an unsupported combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or statistic.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace imitate
