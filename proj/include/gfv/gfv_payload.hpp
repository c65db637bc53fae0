#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfv/errors.hpp"

namespace gfv {

/// Compact facial representation families and the parameter categories they
/// carry (coordinate-kind, matrix-kind, or both).
enum class RepresentationKind : std::uint8_t {
  landmarks_2d = 0,        // 2D landmarks, coordinates
  keypoints_2d = 1,        // 2D keypoints, coordinates
  keypoints_2d_affine = 2, // 2D keypoints + affine matrices
  keypoints_3d_pose = 3,   // 3D keypoints + rotation/translation matrices
  compact_feature = 4,     // compact feature matrices
  facial_semantics = 5,    // facial semantics, matrices
  progressive_tokens = 6,  // progressive tokens, matrices
};

constexpr unsigned kRepresentationKindCount = 7;

bool uses_coordinates(RepresentationKind kind);
bool uses_matrices(RepresentationKind kind);
const char* to_string(RepresentationKind kind);
std::optional<RepresentationKind> kind_from_string(std::string_view name);

/// N coordinates of dimension dims (2 or 3), row-major, normalized units.
struct CoordSet {
  std::size_t count = 0;
  std::size_t dims = 2;
  std::vector<double> values;  // count * dims

  bool operator==(const CoordSet&) const = default;
};

/// count matrices, each rows x cols, row-major and concatenated.
struct MatrixSet {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // count * rows * cols

  bool operator==(const MatrixSet&) const = default;
};

/// One picture's compact facial parameters plus its coding controls.
struct GfvFrameParams {
  RepresentationKind kind = RepresentationKind::keypoints_2d;
  CoordSet coords;
  MatrixSet matrices;
  unsigned precision_bits = 8;  // 1..32, signaled as precision_minus1
  bool prediction = false;
  std::optional<std::string> translator_uri;
  std::optional<std::string> generator_uri;

  bool operator==(const GfvFrameParams&) const = default;
};

/// Previous picture's quantized parameters, the reference for differential
/// coding. Invalid at sequence start and after every base-picture reset.
struct PredictorState {
  bool valid = false;
  std::size_t coord_count = 0;
  std::size_t coord_dims = 0;
  std::vector<std::uint32_t> coords_q;
  std::size_t mat_count = 0;
  std::size_t mat_rows = 0;
  std::size_t mat_cols = 0;
  std::vector<std::uint32_t> matrices_q;

  void reset() { *this = PredictorState{}; }

  bool operator==(const PredictorState&) const = default;
};

/// Value range for the uniform quantizer. Rounding is half-away-from-zero.
struct QuantConfig {
  double lo = -1.0;
  double hi = 1.0;
};

struct QuantStats {
  std::uint64_t clamped = 0;
};

/// q = clamp(round((v - lo) / (hi - lo) * (2^p - 1)), 0, 2^p - 1).
/// Out-of-range v clamps; stats, when given, counts the clamps.
std::uint32_t quantize(double v, unsigned precision_bits, const QuantConfig& cfg = {},
                       QuantStats* stats = nullptr);

/// v = lo + q * (hi - lo) / (2^p - 1).
double dequantize(std::uint32_t q, unsigned precision_bits, const QuantConfig& cfg = {});

/// Signed-to-unsigned bijection: d >= 0 -> 2d, d < 0 -> -2d - 1.
std::uint32_t zigzag(std::int64_t d);
std::int64_t unzigzag(std::uint32_t u);

/// Serializes one picture's parameters into the GFV payload byte layout and
/// advances the predictor state to this picture's quantized values.
///
/// Layout (repo-normative; bit-exact):
///   kind               u(4)
///   coordinate_present u(1)
///   matrix_present     u(1)
///   prediction         u(1)
///   precision_minus1   u(5)
///   uri_present        u(1)
///   if uri_present: 2 x { length ue(v), length UTF-8 bytes u(8) each }
///                   (translator URI first, then generator URI)
///   if coordinate_present:
///     num_coords ue(v), dims u(2), then num_coords*dims values:
///       raw mode        u(p) quantized integer
///       prediction mode ue(zigzag(q_cur - q_prev))
///   if matrix_present:
///     num_matrices ue(v), rows ue(v), cols ue(v), then values as above
///   rbsp trailing bits
std::vector<std::uint8_t> encode_payload(const GfvFrameParams& params, PredictorState& state,
                                         const QuantConfig& cfg = {},
                                         QuantStats* stats = nullptr);

/// Inverse of encode_payload at the quantized-integer level; reals in the
/// result are dequantized under cfg and the state is advanced exactly as the
/// encoder's was.
GfvFrameParams decode_payload(std::span<const std::uint8_t> bytes, PredictorState& state,
                              const QuantConfig& cfg = {});

/// Exact bit count encode_payload would produce before rbsp trailing,
/// computed analytically from the layout rather than by serializing.
std::size_t payload_bit_length(const GfvFrameParams& params, const PredictorState& state,
                               const QuantConfig& cfg = {});

}  // namespace gfv
