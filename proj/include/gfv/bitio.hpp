#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gfv/errors.hpp"

namespace gfv {

/// Appends syntax elements to a byte buffer, most-significant bit first.
/// Field widths are limited to 32 bits; larger writes are a RangeError.
class BitWriter {
public:
  /// Appends the n low bits of value, MSB first. n in 1..32, value < 2^n.
  void put_bits(std::uint32_t value, unsigned n);

  /// Appends the order-0 unsigned Exp-Golomb code of value (value < 2^32 - 1):
  /// z = floor(log2(value + 1)) zero bits, then value + 1 in z + 1 bits.
  void put_ue(std::uint32_t value);

  /// Appends the stop bit and zero-pads to the next byte boundary.
  void put_rbsp_trailing();

  std::size_t bit_offset() const { return bits_; }
  bool byte_aligned() const { return bits_ % 8 == 0; }

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> take() { bits_ = 0; return std::move(buf_); }

private:
  std::vector<std::uint8_t> buf_;
  std::size_t bits_ = 0;
};

/// Reads syntax elements from a byte sequence, MSB first. Reading past the
/// end raises TruncationError; the cursor never advances past a failure.
class BitReader {
public:
  BitReader() = default;
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  /// Reads n bits (1..32) as an unsigned integer.
  std::uint32_t get_bits(unsigned n);

  /// Reads one order-0 unsigned Exp-Golomb code. More than 31 leading zeros
  /// or truncation mid-code raises MalformedCodeError.
  std::uint32_t get_ue();

  /// Consumes the stop bit plus zero padding up to the byte boundary and
  /// validates both.
  void get_rbsp_trailing();

  std::size_t bit_offset() const { return pos_; }
  std::size_t bits_remaining() const { return bytes_.size() * 8 - pos_; }
  bool byte_aligned() const { return pos_ % 8 == 0; }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Bit length of the order-0 Exp-Golomb code for value.
std::size_t ue_bit_length(std::uint32_t value);

}  // namespace gfv
