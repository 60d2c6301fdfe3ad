#pragma once

/// Exception hierarchy shared by the whole library.
///
/// Every error thrown by psihilfer derives from psihilfer::Error, so callers
/// can catch one type at the boundary.  Validation failures throw
/// InvalidArgument; numerical-domain failures throw the more specific types
/// below, each carrying enough context to locate the offending input.

#include <stdexcept>
#include <string>

namespace psihilfer {

/// Base class of all psihilfer exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a user-supplied argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested operation is mathematically singular for the given input
/// (e.g. reweighting toward a weaker endpoint weight with a nonzero limit).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The hybrid multiplier u evaluated to zero (or a non-finite value) at a
/// mesh node; division by it is part of the iteration map.
class DegenerateMultiplier : public Error {
 public:
  DegenerateMultiplier(const std::string& what, double t_node)
      : Error(what), t_node_(t_node) {}

  /// Mesh node (in t) at which the multiplier degenerated.
  double t_node() const noexcept { return t_node_; }

 private:
  double t_node_;
};

/// The boundary operator a*u_i(0) + b*u_i(T) is numerically singular, so the
/// boundary constant of equation `equation_index` cannot be formed.
class SingularBoundaryOperator : public Error {
 public:
  SingularBoundaryOperator(const std::string& what, int equation_index)
      : Error(what), equation_index_(equation_index) {}

  /// 1-based index of the equation whose denominator collapsed.
  int equation_index() const noexcept { return equation_index_; }

 private:
  int equation_index_;
};

/// The mesh is too coarse for the requested finite-difference stage.
class InsufficientResolution : public Error {
 public:
  using Error::Error;
};

/// Expression text failed to parse; `offset` is the byte position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Expression evaluation hit a domain error (division by zero, ln of a
/// non-positive value, sqrt of a negative value, unbound variable).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A configuration file was malformed or incomplete.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace psihilfer
