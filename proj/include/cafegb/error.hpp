#pragma once

#include <stdexcept>
#include <string>

namespace cafegb {

/// Failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorKind {
  kUsage,     // bad arguments or precondition violation by the caller
  kData,      // malformed or inconsistent input data
  kInternal,  // broken invariant inside the toolkit
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

}  // namespace cafegb
