#pragma once

#include <stdexcept>
#include <string>

namespace gfv {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Value does not fit the requested field width or exceeds a hard limit.
class RangeError : public Error {
public:
  using Error::Error;
};

// Input ended before a complete field could be read.
class TruncationError : public Error {
public:
  using Error::Error;
};

// A variable-length code is not decodable (bad prefix, bad trailing bits).
class MalformedCodeError : public Error {
public:
  using Error::Error;
};

// Byte-stream level violation: missing start code, forbidden byte pattern.
class MalformedStreamError : public Error {
public:
  using Error::Error;
};

// Dimensions do not match between two values that must agree.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Differential coding requested without a usable reference.
class PredictorError : public Error {
public:
  using Error::Error;
};

// Payload syntax violates the documented layout (bad tag, bad dims, ...).
class DecodeError : public Error {
public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
  using Error::Error;
};

// Weights file rejected; kind() tells why.
class WeightsError : public Error {
public:
  enum class Kind { bad_magic, bad_version, chain_break, truncated };

  WeightsError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

}  // namespace gfv
