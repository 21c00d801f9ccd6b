#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metallab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is a byte offset into the source.
class SyntaxError : public Error {
public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
  UnknownIdentifier(std::string name, std::size_t offset)
      : Error("unknown identifier \"" + name + "\" at offset " + std::to_string(offset)),
        name_(std::move(name)),
        offset_(offset) {}
  const std::string& name() const { return name_; }
  std::size_t offset() const { return offset_; }

private:
  std::string name_;
  std::size_t offset_;
};

/// log of a nonpositive number, division by zero, and friends. `offset()`
/// locates the offending node in the expression source.
class DomainError : public Error {
public:
  DomainError(const std::string& message, std::size_t offset)
      : Error(message + " (node at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class SingularMetric : public Error {
public:
  using Error::Error;
};

class InvalidProduct : public Error {
public:
  using Error::Error;
};

class InvalidStructure : public Error {
public:
  using Error::Error;
};

class ImmersionDegenerate : public Error {
public:
  using Error::Error;
};

class NotNormalField : public Error {
public:
  using Error::Error;
};

class NotInDistribution : public Error {
public:
  using Error::Error;
};

class PreconditionNotMet : public Error {
public:
  using Error::Error;
};

}  // namespace metallab
