#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modgraph {

enum class ErrorKind {
  Format,
  Data,
  Shape,
  Io,
  Parameter,
  DegenerateVector,
  EmptyGraph,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Base of every error raised by the library. The kind survives context
// wrapping so callers (and the C API) can map errors to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorKind::Format, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorKind::Data, m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error(ErrorKind::Shape, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& m) : Error(ErrorKind::Parameter, m) {}
};

class DegenerateVectorError : public Error {
 public:
  DegenerateVectorError(const std::string& m, std::size_t sample)
      : Error(ErrorKind::DegenerateVector, m), sample_(sample) {}

  std::size_t sample_index() const noexcept { return sample_; }

 private:
  std::size_t sample_;
};

class EmptyGraphError : public Error {
 public:
  explicit EmptyGraphError(const std::string& m) : Error(ErrorKind::EmptyGraph, m) {}
};

// Rethrows `e` with `context` prefixed to its message, keeping the kind.
[[noreturn]] void rethrow_with_context(const Error& e, std::string_view context);

}  // namespace modgraph
