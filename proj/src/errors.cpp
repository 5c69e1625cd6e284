#include "modgraph/errors.hpp"

namespace modgraph {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::Data: return "DataError";
    case ErrorKind::Shape: return "ShapeError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parameter: return "ParameterError";
    case ErrorKind::DegenerateVector: return "DegenerateVectorError";
    case ErrorKind::EmptyGraph: return "EmptyGraphError";
  }
  return "Error";
}

void rethrow_with_context(const Error& e, std::string_view context) {
  std::string msg(context);
  msg += ": ";
  msg += e.what();
  switch (e.kind()) {
    case ErrorKind::Format: throw FormatError(msg);
    case ErrorKind::Data: throw DataError(msg);
    case ErrorKind::Shape: throw ShapeError(msg);
    case ErrorKind::Io: throw IoError(msg);
    case ErrorKind::Parameter: throw ParameterError(msg);
    case ErrorKind::DegenerateVector: {
      const auto& d = static_cast<const DegenerateVectorError&>(e);
      throw DegenerateVectorError(msg, d.sample_index());
    }
    case ErrorKind::EmptyGraph: throw EmptyGraphError(msg);
  }
  throw Error(e.kind(), msg);
}

}  // namespace modgraph
