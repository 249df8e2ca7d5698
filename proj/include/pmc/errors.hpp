#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

/// Base class of every error raised by the library. Callers that only care
/// about "something went wrong" catch this; tests match on the subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A stacked configuration with lower > upper at some node.
class OrderingViolation : public Error {
 public:
  using Error::Error;
};

/// c > 2: a sphere of radius 2/c cannot span the unit disk.
class RadiusTooSmall : public Error {
 public:
  using Error::Error;
};

/// Single-sheet energy unbounded below (c > 2).
class NonCoercive : public Error {
 public:
  using Error::Error;
};

/// eps at or above the touching threshold: the sheets never meet.
class NoContact : public Error {
 public:
  using Error::Error;
};

class NoFreeBoundary : public Error {
 public:
  using Error::Error;
};

/// Contact set does not contain the center node.
class DisconnectedContact : public Error {
 public:
  using Error::Error;
};

/// Mass bounds do not cross on (0, 2).
class NoThreshold : public Error {
 public:
  using Error::Error;
};

/// Volume exceeds eta; the isoperimetric bound does not apply.
class Inapplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace pmc
