#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gfv/errors.hpp"

namespace gfv {

enum class CodecFamily { avc, hevc, vvc };

const char* to_string(CodecFamily family);

/// One NAL unit: family-specific header bytes plus the unescaped RBSP.
struct NalUnit {
  CodecFamily family = CodecFamily::vvc;
  std::vector<std::uint8_t> header;  // 1 byte for AVC, 2 for HEVC/VVC
  std::vector<std::uint8_t> rbsp;

  unsigned nal_unit_type() const;
  bool is_sei() const;

  bool operator==(const NalUnit&) const = default;
};

/// An SEI message before carriage: payload type plus raw payload bytes.
/// Type and size are serialized with 0xFF extension bytes (each 0xFF adds 255).
struct SeiMessage {
  std::uint32_t payload_type = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const SeiMessage&) const = default;
};

using AccessUnit = std::vector<NalUnit>;

/// An Annex-B stream split into access units, one picture per unit.
/// SEI NAL units precede the picture payload NAL units within a unit.
struct AccessUnitStream {
  CodecFamily family = CodecFamily::vvc;
  std::vector<AccessUnit> access_units;

  bool operator==(const AccessUnitStream&) const = default;
};

/// Inserts an emulation-prevention 0x03 after every 0x00 0x00 pair that is
/// followed by a byte <= 0x03. The result never contains 00 00 00, 00 00 01,
/// or 00 00 02.
std::vector<std::uint8_t> escape_emulation(std::span<const std::uint8_t> rbsp);

/// Exact inverse of escape_emulation. A surviving 00 00 0x (x <= 2) triple
/// raises MalformedStreamError.
std::vector<std::uint8_t> unescape_emulation(std::span<const std::uint8_t> escaped);

/// Default prefix-SEI NAL header for the family (AVC type 6, HEVC type 39,
/// VVC type 23).
std::vector<std::uint8_t> sei_prefix_header(CodecFamily family);

/// Wraps one SEI message into a prefix-SEI NAL unit. Payload must be shorter
/// than 2^16 bytes. A nonempty header_override replaces the family default.
NalUnit build_sei_nal(const SeiMessage& msg, CodecFamily family,
                      std::span<const std::uint8_t> header_override = {});

/// Parses every SEI message carried in the NAL unit and validates the
/// trailing byte.
std::vector<SeiMessage> parse_sei_nal(const NalUnit& nal);

/// Returns true when `next` opens a new access unit given the NAL units
/// collected so far for the current one.
using AuBoundaryPredicate =
    std::function<bool(const NalUnit& next, const AccessUnit& current)>;

/// Splits an Annex-B byte stream (3- or 4-byte start codes) into access
/// units. The default boundary predicate starts a new unit once the current
/// one holds a non-SEI NAL, so each unit is a run of SEI NALs followed by
/// one picture NAL.
AccessUnitStream split_annexb(std::span<const std::uint8_t> stream, CodecFamily family,
                              const AuBoundaryPredicate& boundary = {});

/// Re-emits the stream with a 4-byte start code for the first NAL of each
/// access unit and 3-byte start codes otherwise.
std::vector<std::uint8_t> serialize_annexb(const AccessUnitStream& aus);

/// Inserts `sei` into the indexed access unit, after any SEI NALs already
/// leading it.
void insert_sei(AccessUnitStream& aus, std::size_t picture_index, NalUnit sei);

/// Removes all SEI NAL units; every other NAL is preserved byte-identically.
AccessUnitStream strip_sei(const AccessUnitStream& aus);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace gfv
