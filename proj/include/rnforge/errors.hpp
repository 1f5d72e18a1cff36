#pragma once

#include <stdexcept>
#include <string>

namespace rnforge {

// Argument outside the mathematical domain of an operation (negative
// square root, zero factorization, square Pell discriminant, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured resource cap was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input (JSONL record, certificate, equation text).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data that parses but is inconsistent (curve point off its curve,
// non-exact division during extraction).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rnforge
