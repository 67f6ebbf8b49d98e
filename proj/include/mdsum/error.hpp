#ifndef MDSUM_ERROR_HPP
#define MDSUM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mdsum {

// Base for every error the library reports. Callers that only care about
// "did the cluster fail" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyClusterError : public Error {
 public:
  using Error::Error;
};

// Preprocessing left nothing to factorize (no vocabulary, no sentences).
class DegenerateClusterError : public Error {
 public:
  using Error::Error;
};

// Caller broke a precondition: mismatched dimensions, weights not summing
// to one, and so on.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace mdsum

#endif  // MDSUM_ERROR_HPP
