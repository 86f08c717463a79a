#pragma once

#include <stdexcept>
#include <string>

namespace qiwave {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation applied outside its mathematical domain (e.g. |0|^σ with σ < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A parameter combination the implementation does not handle (e.g. odd s in
// the Leibniz expansion).
class UnsupportedParameter : public Error {
 public:
  using Error::Error;
};

// Time stepping produced non-finite values.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, long step)
      : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

// Every sample of an ensemble was rejected by the energy cutoff.
class DegenerateEnsemble : public Error {
 public:
  using Error::Error;
};

// Invalid user input (configs, state files).  `path` is a JSON-pointer-like
// location of the offending entry, empty when it does not apply.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string path = {})
      : Error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qiwave
