#include "gfv/nal_mux.hpp"

#include <algorithm>
#include <fstream>

namespace gfv {

namespace {

constexpr unsigned kAvcSeiType = 6;
constexpr unsigned kHevcPrefixSeiType = 39;
constexpr unsigned kHevcSuffixSeiType = 40;
constexpr unsigned kVvcPrefixSeiType = 23;
constexpr unsigned kVvcSuffixSeiType = 24;

std::size_t header_length(CodecFamily family) {
  return family == CodecFamily::avc ? 1 : 2;
}

}  // namespace

const char* to_string(CodecFamily family) {
  switch (family) {
    case CodecFamily::avc: return "avc";
    case CodecFamily::hevc: return "hevc";
    case CodecFamily::vvc: return "vvc";
  }
  return "?";
}

unsigned NalUnit::nal_unit_type() const {
  switch (family) {
    case CodecFamily::avc: return header.at(0) & 0x1F;
    case CodecFamily::hevc: return (header.at(0) >> 1) & 0x3F;
    case CodecFamily::vvc: return (header.at(1) >> 3) & 0x1F;
  }
  return 0;
}

bool NalUnit::is_sei() const {
  const unsigned type = nal_unit_type();
  switch (family) {
    case CodecFamily::avc: return type == kAvcSeiType;
    case CodecFamily::hevc: return type == kHevcPrefixSeiType || type == kHevcSuffixSeiType;
    case CodecFamily::vvc: return type == kVvcPrefixSeiType || type == kVvcSuffixSeiType;
  }
  return false;
}

std::vector<std::uint8_t> escape_emulation(std::span<const std::uint8_t> rbsp) {
  std::vector<std::uint8_t> out;
  out.reserve(rbsp.size() + rbsp.size() / 64 + 4);
  unsigned zeros = 0;
  for (const std::uint8_t b : rbsp) {
    if (zeros >= 2 && b <= 0x03) {
      out.push_back(0x03);
      zeros = 0;
    }
    out.push_back(b);
    zeros = (b == 0x00) ? zeros + 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> unescape_emulation(std::span<const std::uint8_t> escaped) {
  std::vector<std::uint8_t> out;
  out.reserve(escaped.size());
  unsigned zeros = 0;
  for (const std::uint8_t b : escaped) {
    if (zeros >= 2) {
      if (b <= 0x02) {
        throw MalformedStreamError("unescape: forbidden 00 00 0x pattern");
      }
      if (b == 0x03) {
        zeros = 0;
        continue;  // emulation-prevention byte
      }
    }
    out.push_back(b);
    zeros = (b == 0x00) ? zeros + 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> sei_prefix_header(CodecFamily family) {
  switch (family) {
    case CodecFamily::avc:
      return {0x06};  // nal_ref_idc 0, nal_unit_type 6
    case CodecFamily::hevc:
      // nal_unit_type 39, nuh_layer_id 0, nuh_temporal_id_plus1 1
      return {static_cast<std::uint8_t>(kHevcPrefixSeiType << 1), 0x01};
    case CodecFamily::vvc:
      // nuh_layer_id 0, nal_unit_type 23, nuh_temporal_id_plus1 1
      return {0x00, static_cast<std::uint8_t>((kVvcPrefixSeiType << 3) | 0x01)};
  }
  throw RangeError("unknown codec family");
}

namespace {

void put_ff_extended(std::vector<std::uint8_t>& out, std::uint32_t value) {
  while (value >= 255) {
    out.push_back(0xFF);
    value -= 255;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint32_t get_ff_extended(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint32_t value = 0;
  while (true) {
    if (pos >= bytes.size()) {
      throw TruncationError("sei: truncated 0xFF-extended field");
    }
    const std::uint8_t b = bytes[pos++];
    value += b;
    if (b != 0xFF) {
      return value;
    }
  }
}

}  // namespace

NalUnit build_sei_nal(const SeiMessage& msg, CodecFamily family,
                      std::span<const std::uint8_t> header_override) {
  if (msg.payload.size() >= (1u << 16)) {
    throw RangeError("build_sei_nal: payload must be < 2^16 bytes");
  }
  NalUnit nal;
  nal.family = family;
  nal.header = header_override.empty()
                   ? sei_prefix_header(family)
                   : std::vector<std::uint8_t>(header_override.begin(), header_override.end());
  put_ff_extended(nal.rbsp, msg.payload_type);
  put_ff_extended(nal.rbsp, static_cast<std::uint32_t>(msg.payload.size()));
  nal.rbsp.insert(nal.rbsp.end(), msg.payload.begin(), msg.payload.end());
  nal.rbsp.push_back(0x80);  // rbsp trailing at a byte-aligned position
  return nal;
}

std::vector<SeiMessage> parse_sei_nal(const NalUnit& nal) {
  if (!nal.is_sei()) {
    throw MalformedStreamError("parse_sei_nal: not an SEI NAL unit");
  }
  if (nal.rbsp.empty() || nal.rbsp.back() != 0x80) {
    throw MalformedStreamError("parse_sei_nal: missing rbsp trailing byte");
  }
  const std::span<const std::uint8_t> body(nal.rbsp.data(), nal.rbsp.size() - 1);
  std::vector<SeiMessage> messages;
  std::size_t pos = 0;
  while (pos < body.size()) {
    SeiMessage msg;
    msg.payload_type = get_ff_extended(body, pos);
    const std::uint32_t size = get_ff_extended(body, pos);
    if (body.size() - pos < size) {
      throw TruncationError("parse_sei_nal: declared payload size exceeds data");
    }
    msg.payload.assign(body.begin() + pos, body.begin() + pos + size);
    pos += size;
    messages.push_back(std::move(msg));
  }
  if (messages.empty()) {
    throw MalformedStreamError("parse_sei_nal: no messages in SEI NAL");
  }
  return messages;
}

namespace {

bool default_boundary(const NalUnit&, const AccessUnit& current) {
  return std::any_of(current.begin(), current.end(),
                     [](const NalUnit& n) { return !n.is_sei(); });
}

constexpr std::size_t kNotFound = static_cast<std::size_t>(-1);

// Start codes are 00 00 01, optionally preceded by one 00 (the 4-byte form).
// Returns the offset of the 00 00 01 pattern, or kNotFound.
std::size_t find_start_code(std::span<const std::uint8_t> s, std::size_t from) {
  if (s.size() < 3) {
    return kNotFound;
  }
  for (std::size_t i = from; i + 2 < s.size(); ++i) {
    if (s[i] == 0x00 && s[i + 1] == 0x00 && s[i + 2] == 0x01) {
      return i;
    }
  }
  return kNotFound;
}

}  // namespace

AccessUnitStream split_annexb(std::span<const std::uint8_t> stream, CodecFamily family,
                              const AuBoundaryPredicate& boundary) {
  const AuBoundaryPredicate pred = boundary ? boundary : default_boundary;

  std::size_t first = find_start_code(stream, 0);
  const bool at_origin = first == 0 || (first == 1 && stream[0] == 0x00);
  if (first == kNotFound || !at_origin) {
    throw MalformedStreamError("split_annexb: no start code at offset 0");
  }

  std::vector<NalUnit> nals;
  std::size_t pos = first + 3;
  while (pos < stream.size()) {
    std::size_t next = find_start_code(stream, pos);
    std::size_t end = (next == kNotFound) ? stream.size() : next;
    std::size_t next_pos = (next == kNotFound) ? stream.size() : next + 3;
    // One preceding zero belongs to a 4-byte start code, not to this NAL.
    if (next != kNotFound && next > pos && stream[next - 1] == 0x00) {
      --end;
    }
    if (end - pos < header_length(family)) {
      throw MalformedStreamError("split_annexb: NAL unit shorter than its header");
    }
    NalUnit nal;
    nal.family = family;
    nal.header.assign(stream.begin() + pos, stream.begin() + pos + header_length(family));
    nal.rbsp = unescape_emulation(stream.subspan(pos + header_length(family), end - (pos + header_length(family))));
    nals.push_back(std::move(nal));
    pos = next_pos;
  }

  AccessUnitStream out;
  out.family = family;
  AccessUnit current;
  for (NalUnit& nal : nals) {
    if (!current.empty() && pred(nal, current)) {
      out.access_units.push_back(std::move(current));
      current.clear();
    }
    current.push_back(std::move(nal));
  }
  if (!current.empty()) {
    out.access_units.push_back(std::move(current));
  }
  return out;
}

std::vector<std::uint8_t> serialize_annexb(const AccessUnitStream& aus) {
  std::vector<std::uint8_t> out;
  for (const AccessUnit& au : aus.access_units) {
    for (std::size_t i = 0; i < au.size(); ++i) {
      if (i == 0) {
        out.push_back(0x00);
      }
      out.insert(out.end(), {0x00, 0x00, 0x01});
      out.insert(out.end(), au[i].header.begin(), au[i].header.end());
      const std::vector<std::uint8_t> escaped = escape_emulation(au[i].rbsp);
      out.insert(out.end(), escaped.begin(), escaped.end());
    }
  }
  return out;
}

void insert_sei(AccessUnitStream& aus, std::size_t picture_index, NalUnit sei) {
  if (picture_index >= aus.access_units.size()) {
    throw RangeError("insert_sei: picture index out of range");
  }
  AccessUnit& au = aus.access_units[picture_index];
  auto it = au.begin();
  while (it != au.end() && it->is_sei()) {
    ++it;
  }
  au.insert(it, std::move(sei));
}

AccessUnitStream strip_sei(const AccessUnitStream& aus) {
  AccessUnitStream out;
  out.family = aus.family;
  for (const AccessUnit& au : aus.access_units) {
    AccessUnit kept;
    for (const NalUnit& nal : au) {
      if (!nal.is_sei()) {
        kept.push_back(nal);
      }
    }
    if (!kept.empty()) {
      out.access_units.push_back(std::move(kept));
    }
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  return data;
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace gfv
