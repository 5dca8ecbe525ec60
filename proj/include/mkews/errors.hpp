#pragma once

#include <stdexcept>
#include <string>

namespace mkews {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two observations share a value; rank-based statistics assume distinct values.
class TieError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the input (constant series or window).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// The bifurcation parameter is not on a stable branch of the normal form.
class NoStableBranch : public Error {
 public:
  using Error::Error;
};

/// Too many consecutive trajectories left the basin of attraction.
class EscapeLimit : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration. The CLI maps this to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mkews
