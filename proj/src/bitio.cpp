#include "gfv/bitio.hpp"

#include <bit>

namespace gfv {

void BitWriter::put_bits(std::uint32_t value, unsigned n) {
  if (n < 1 || n > 32) {
    throw RangeError("put_bits: field width must be in 1..32");
  }
  if (n < 32 && value >= (std::uint64_t{1} << n)) {
    throw RangeError("put_bits: value does not fit in " + std::to_string(n) + " bits");
  }
  for (unsigned i = n; i-- > 0;) {
    if (bits_ % 8 == 0) {
      buf_.push_back(0);
    }
    const unsigned bit = (value >> i) & 1u;
    buf_.back() |= static_cast<std::uint8_t>(bit << (7 - bits_ % 8));
    ++bits_;
  }
}

void BitWriter::put_ue(std::uint32_t value) {
  if (value == 0xFFFFFFFFu) {
    throw RangeError("put_ue: value must be < 2^32 - 1");
  }
  const std::uint32_t code = value + 1;
  const unsigned len = std::bit_width(code);  // z + 1
  if (len > 1) {
    put_bits(0, len - 1);
  }
  put_bits(code, len);
}

void BitWriter::put_rbsp_trailing() {
  put_bits(1, 1);
  while (bits_ % 8 != 0) {
    put_bits(0, 1);
  }
}

std::uint32_t BitReader::get_bits(unsigned n) {
  if (n < 1 || n > 32) {
    throw RangeError("get_bits: field width must be in 1..32");
  }
  if (bits_remaining() < n) {
    throw TruncationError("get_bits: premature end of data");
  }
  std::uint32_t value = 0;
  for (unsigned i = 0; i < n; ++i) {
    const std::uint8_t byte = bytes_[pos_ / 8];
    const unsigned bit = (byte >> (7 - pos_ % 8)) & 1u;
    value = (value << 1) | bit;
    ++pos_;
  }
  return value;
}

std::uint32_t BitReader::get_ue() {
  const std::size_t start = pos_;
  try {
    unsigned zeros = 0;
    while (get_bits(1) == 0) {
      if (++zeros > 31) {
        throw MalformedCodeError("get_ue: more than 31 leading zeros");
      }
    }
    std::uint32_t code = 1;
    if (zeros > 0) {
      code = (code << zeros) | get_bits(zeros);
    }
    return code - 1;
  } catch (const TruncationError&) {
    pos_ = start;
    throw MalformedCodeError("get_ue: code truncated");
  }
}

void BitReader::get_rbsp_trailing() {
  if (get_bits(1) != 1) {
    throw MalformedCodeError("rbsp trailing: missing stop bit");
  }
  while (pos_ % 8 != 0) {
    if (get_bits(1) != 0) {
      throw MalformedCodeError("rbsp trailing: nonzero padding bit");
    }
  }
}

std::size_t ue_bit_length(std::uint32_t value) {
  if (value == 0xFFFFFFFFu) {
    throw RangeError("ue_bit_length: value must be < 2^32 - 1");
  }
  return 2 * (std::bit_width(value + 1) - 1u) + 1;
}

}  // namespace gfv
