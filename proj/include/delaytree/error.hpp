#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delaytree {

// Malformed or inconsistent input data. Carries the source (usually a file
// name) and 1-based line number when known; line 0 means "not line-specific".
class DataError : public std::runtime_error {
 public:
  explicit DataError(std::string reason);
  DataError(std::string source, std::size_t line, std::string reason);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string source_;
  std::size_t line_ = 0;
  std::string reason_;
};

// Invalid invocation or configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical precondition was violated (empty distribution, inconsistent
// split counts, empty training set).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace delaytree
