#include "gfv/gfv_payload.hpp"

#include <bit>
#include <cmath>

#include "gfv/bitio.hpp"

namespace gfv {

bool uses_coordinates(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::landmarks_2d:
    case RepresentationKind::keypoints_2d:
    case RepresentationKind::keypoints_2d_affine:
    case RepresentationKind::keypoints_3d_pose:
      return true;
    default:
      return false;
  }
}

bool uses_matrices(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::keypoints_2d_affine:
    case RepresentationKind::keypoints_3d_pose:
    case RepresentationKind::compact_feature:
    case RepresentationKind::facial_semantics:
    case RepresentationKind::progressive_tokens:
      return true;
    default:
      return false;
  }
}

const char* to_string(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::landmarks_2d: return "LANDMARKS_2D";
    case RepresentationKind::keypoints_2d: return "KEYPOINTS_2D";
    case RepresentationKind::keypoints_2d_affine: return "KEYPOINTS_2D_AFFINE";
    case RepresentationKind::keypoints_3d_pose: return "KEYPOINTS_3D_POSE";
    case RepresentationKind::compact_feature: return "COMPACT_FEATURE";
    case RepresentationKind::facial_semantics: return "FACIAL_SEMANTICS";
    case RepresentationKind::progressive_tokens: return "PROGRESSIVE_TOKENS";
  }
  return "?";
}

std::optional<RepresentationKind> kind_from_string(std::string_view name) {
  for (unsigned i = 0; i < kRepresentationKindCount; ++i) {
    const auto kind = static_cast<RepresentationKind>(i);
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

std::uint32_t quantize(double v, unsigned precision_bits, const QuantConfig& cfg,
                       QuantStats* stats) {
  if (precision_bits < 1 || precision_bits > 32) {
    throw RangeError("quantize: precision must be in 1..32");
  }
  const double max_q = static_cast<double>((std::uint64_t{1} << precision_bits) - 1);
  const double scaled = (v - cfg.lo) / (cfg.hi - cfg.lo) * max_q;
  const double rounded = std::round(scaled);  // half away from zero
  double clamped = rounded;
  if (clamped < 0.0) {
    clamped = 0.0;
  } else if (clamped > max_q) {
    clamped = max_q;
  }
  if (stats != nullptr && clamped != rounded) {
    ++stats->clamped;
  }
  return static_cast<std::uint32_t>(clamped);
}

double dequantize(std::uint32_t q, unsigned precision_bits, const QuantConfig& cfg) {
  if (precision_bits < 1 || precision_bits > 32) {
    throw RangeError("dequantize: precision must be in 1..32");
  }
  const double max_q = static_cast<double>((std::uint64_t{1} << precision_bits) - 1);
  return cfg.lo + static_cast<double>(q) * (cfg.hi - cfg.lo) / max_q;
}

std::uint32_t zigzag(std::int64_t d) {
  if (d >= (std::int64_t{1} << 31) || d <= -(std::int64_t{1} << 31)) {
    throw RangeError("zigzag: |d| must be < 2^31");
  }
  return d >= 0 ? static_cast<std::uint32_t>(2 * d)
                : static_cast<std::uint32_t>(-2 * d - 1);
}

std::int64_t unzigzag(std::uint32_t u) {
  return (u % 2 == 0) ? static_cast<std::int64_t>(u / 2)
                      : -static_cast<std::int64_t>(u / 2) - 1;
}

namespace {

void validate_params(const GfvFrameParams& p) {
  if (p.precision_bits < 1 || p.precision_bits > 32) {
    throw RangeError("params: precision_bits must be in 1..32");
  }
  if (p.coords.count > 0) {
    if (!uses_coordinates(p.kind)) {
      throw ShapeError("params: kind carries no coordinate parameters");
    }
    if (p.coords.dims != 2 && p.coords.dims != 3) {
      throw ShapeError("params: coordinate dims must be 2 or 3");
    }
    if (p.coords.values.size() != p.coords.count * p.coords.dims) {
      throw ShapeError("params: coordinate value count mismatch");
    }
  }
  if (p.matrices.count > 0) {
    if (!uses_matrices(p.kind)) {
      throw ShapeError("params: kind carries no matrix parameters");
    }
    if (p.matrices.rows < 1 || p.matrices.cols < 1) {
      throw ShapeError("params: matrix dims must be >= 1");
    }
    if (p.matrices.values.size() != p.matrices.count * p.matrices.rows * p.matrices.cols) {
      throw ShapeError("params: matrix value count mismatch");
    }
  }
}

void check_prediction_refs(const GfvFrameParams& p, const PredictorState& state) {
  if (!p.prediction) {
    return;
  }
  const bool cp = p.coords.count > 0;
  const bool mp = p.matrices.count > 0;
  if (!cp && !mp) {
    return;  // no-update message, nothing to predict
  }
  if (!state.valid) {
    throw PredictorError("prediction requested with invalid predictor state");
  }
  if (cp) {
    if (state.coord_count == 0) {
      throw PredictorError("prediction: no coordinate reference in state");
    }
    if (state.coord_count != p.coords.count || state.coord_dims != p.coords.dims) {
      throw ShapeError("prediction: coordinate shape differs from state");
    }
  }
  if (mp) {
    if (state.mat_count == 0) {
      throw PredictorError("prediction: no matrix reference in state");
    }
    if (state.mat_count != p.matrices.count || state.mat_rows != p.matrices.rows ||
        state.mat_cols != p.matrices.cols) {
      throw ShapeError("prediction: matrix shape differs from state");
    }
  }
}

std::vector<std::uint32_t> quantize_all(std::span<const double> values, unsigned p,
                                        const QuantConfig& cfg, QuantStats* stats) {
  std::vector<std::uint32_t> q(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    q[i] = quantize(values[i], p, cfg, stats);
  }
  return q;
}

void write_values(BitWriter& w, std::span<const std::uint32_t> q,
                  std::span<const std::uint32_t> prev, bool prediction, unsigned p) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (prediction) {
      const std::int64_t delta =
          static_cast<std::int64_t>(q[i]) - static_cast<std::int64_t>(prev[i]);
      w.put_ue(zigzag(delta));
    } else {
      w.put_bits(q[i], p);
    }
  }
}

void write_text(BitWriter& w, const std::string& text) {
  w.put_ue(static_cast<std::uint32_t>(text.size()));
  for (const char c : text) {
    w.put_bits(static_cast<std::uint8_t>(c), 8);
  }
}

std::optional<std::string> read_text(BitReader& r) {
  const std::uint32_t len = r.get_ue();
  if (len == 0) {
    return std::nullopt;
  }
  std::string text(len, '\0');
  for (auto& c : text) {
    c = static_cast<char>(r.get_bits(8));
  }
  return text;
}

}  // namespace

std::vector<std::uint8_t> encode_payload(const GfvFrameParams& params, PredictorState& state,
                                         const QuantConfig& cfg, QuantStats* stats) {
  validate_params(params);
  check_prediction_refs(params, state);

  const bool coordinate_present = params.coords.count > 0;
  const bool matrix_present = params.matrices.count > 0;
  const unsigned p = params.precision_bits;

  const std::vector<std::uint32_t> coords_q =
      quantize_all(params.coords.values, p, cfg, stats);
  const std::vector<std::uint32_t> matrices_q =
      quantize_all(params.matrices.values, p, cfg, stats);

  BitWriter w;
  w.put_bits(static_cast<std::uint32_t>(params.kind), 4);
  w.put_bits(coordinate_present ? 1 : 0, 1);
  w.put_bits(matrix_present ? 1 : 0, 1);
  w.put_bits(params.prediction ? 1 : 0, 1);
  w.put_bits(p - 1, 5);
  const bool uri_present = params.translator_uri.has_value() || params.generator_uri.has_value();
  w.put_bits(uri_present ? 1 : 0, 1);
  if (uri_present) {
    write_text(w, params.translator_uri.value_or(""));
    write_text(w, params.generator_uri.value_or(""));
  }
  if (coordinate_present) {
    w.put_ue(static_cast<std::uint32_t>(params.coords.count));
    w.put_bits(static_cast<std::uint32_t>(params.coords.dims), 2);
    write_values(w, coords_q, state.coords_q, params.prediction, p);
  }
  if (matrix_present) {
    w.put_ue(static_cast<std::uint32_t>(params.matrices.count));
    w.put_ue(static_cast<std::uint32_t>(params.matrices.rows));
    w.put_ue(static_cast<std::uint32_t>(params.matrices.cols));
    write_values(w, matrices_q, state.matrices_q, params.prediction, p);
  }
  w.put_rbsp_trailing();

  if (coordinate_present) {
    state.coord_count = params.coords.count;
    state.coord_dims = params.coords.dims;
    state.coords_q = coords_q;
  }
  if (matrix_present) {
    state.mat_count = params.matrices.count;
    state.mat_rows = params.matrices.rows;
    state.mat_cols = params.matrices.cols;
    state.matrices_q = matrices_q;
  }
  if (coordinate_present || matrix_present) {
    state.valid = true;
  }
  return w.take();
}

namespace {

std::vector<std::uint32_t> read_values(BitReader& r, std::size_t count,
                                       std::span<const std::uint32_t> prev, bool prediction,
                                       unsigned p) {
  // Every value takes at least one bit; cheap bound before allocating.
  if (count > r.bits_remaining()) {
    throw TruncationError("decode: declared value count exceeds payload size");
  }
  const std::uint64_t max_q = (std::uint64_t{1} << p) - 1;
  std::vector<std::uint32_t> q(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (prediction) {
      const std::int64_t value =
          static_cast<std::int64_t>(prev[i]) + unzigzag(r.get_ue());
      if (value < 0 || static_cast<std::uint64_t>(value) > max_q) {
        throw DecodeError("decode: predicted value out of quantizer range");
      }
      q[i] = static_cast<std::uint32_t>(value);
    } else {
      q[i] = r.get_bits(p);
    }
  }
  return q;
}

std::vector<double> dequantize_all(std::span<const std::uint32_t> q, unsigned p,
                                   const QuantConfig& cfg) {
  std::vector<double> v(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    v[i] = dequantize(q[i], p, cfg);
  }
  return v;
}

}  // namespace

GfvFrameParams decode_payload(std::span<const std::uint8_t> bytes, PredictorState& state,
                              const QuantConfig& cfg) {
  BitReader r(bytes);
  GfvFrameParams params;

  const std::uint32_t tag = r.get_bits(4);
  if (tag >= kRepresentationKindCount) {
    throw DecodeError("decode: unknown representation kind tag");
  }
  params.kind = static_cast<RepresentationKind>(tag);
  const bool coordinate_present = r.get_bits(1) != 0;
  const bool matrix_present = r.get_bits(1) != 0;
  params.prediction = r.get_bits(1) != 0;
  const unsigned p = r.get_bits(5) + 1;
  params.precision_bits = p;
  if (r.get_bits(1) != 0) {
    params.translator_uri = read_text(r);
    params.generator_uri = read_text(r);
  }

  std::vector<std::uint32_t> coords_q;
  std::vector<std::uint32_t> matrices_q;
  if (coordinate_present) {
    params.coords.count = r.get_ue();
    if (params.coords.count == 0) {
      throw DecodeError("decode: coordinate_present with zero coordinates");
    }
    params.coords.dims = r.get_bits(2);
    if (params.coords.dims != 2 && params.coords.dims != 3) {
      throw DecodeError("decode: coordinate dims must be 2 or 3");
    }
    if (params.prediction) {
      if (!state.valid || state.coord_count == 0) {
        throw PredictorError("decode: prediction without a coordinate reference");
      }
      if (state.coord_count != params.coords.count || state.coord_dims != params.coords.dims) {
        throw ShapeError("decode: coordinate shape differs from state");
      }
    }
    coords_q = read_values(r, params.coords.count * params.coords.dims, state.coords_q,
                           params.prediction, p);
    params.coords.values = dequantize_all(coords_q, p, cfg);
  }
  if (matrix_present) {
    params.matrices.count = r.get_ue();
    params.matrices.rows = r.get_ue();
    params.matrices.cols = r.get_ue();
    if (params.matrices.count == 0 || params.matrices.rows == 0 || params.matrices.cols == 0) {
      throw DecodeError("decode: matrix_present with empty dimensions");
    }
    // Overflow-safe size bound before the element loop allocates.
    const std::size_t rem = r.bits_remaining();
    if (params.matrices.count > rem || params.matrices.rows > rem ||
        params.matrices.cols > rem ||
        params.matrices.count * params.matrices.rows * params.matrices.cols > rem) {
      throw TruncationError("decode: declared matrix size exceeds payload size");
    }
    if (params.prediction) {
      if (!state.valid || state.mat_count == 0) {
        throw PredictorError("decode: prediction without a matrix reference");
      }
      if (state.mat_count != params.matrices.count || state.mat_rows != params.matrices.rows ||
          state.mat_cols != params.matrices.cols) {
        throw ShapeError("decode: matrix shape differs from state");
      }
    }
    matrices_q = read_values(
        r, params.matrices.count * params.matrices.rows * params.matrices.cols,
        state.matrices_q, params.prediction, p);
    params.matrices.values = dequantize_all(matrices_q, p, cfg);
  }
  r.get_rbsp_trailing();
  if (r.bits_remaining() != 0) {
    throw DecodeError("decode: trailing data after payload");
  }

  if (coordinate_present) {
    state.coord_count = params.coords.count;
    state.coord_dims = params.coords.dims;
    state.coords_q = std::move(coords_q);
  }
  if (matrix_present) {
    state.mat_count = params.matrices.count;
    state.mat_rows = params.matrices.rows;
    state.mat_cols = params.matrices.cols;
    state.matrices_q = std::move(matrices_q);
  }
  if (coordinate_present || matrix_present) {
    state.valid = true;
  }
  return params;
}

std::size_t payload_bit_length(const GfvFrameParams& params, const PredictorState& state,
                               const QuantConfig& cfg) {
  validate_params(params);
  check_prediction_refs(params, state);

  const unsigned p = params.precision_bits;
  std::size_t bits = 4 + 1 + 1 + 1 + 5 + 1;  // fixed header fields

  if (params.translator_uri.has_value() || params.generator_uri.has_value()) {
    for (const auto* uri : {&params.translator_uri, &params.generator_uri}) {
      const std::size_t len = uri->has_value() ? (*uri)->size() : 0;
      bits += ue_bit_length(static_cast<std::uint32_t>(len)) + 8 * len;
    }
  }

  const auto section_bits = [&](std::span<const double> values,
                                std::span<const std::uint32_t> prev) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::uint32_t q = quantize(values[i], p, cfg);
      if (params.prediction) {
        const std::int64_t delta =
            static_cast<std::int64_t>(q) - static_cast<std::int64_t>(prev[i]);
        n += ue_bit_length(zigzag(delta));
      } else {
        n += p;
      }
    }
    return n;
  };

  if (params.coords.count > 0) {
    bits += ue_bit_length(static_cast<std::uint32_t>(params.coords.count)) + 2;
    bits += section_bits(params.coords.values, state.coords_q);
  }
  if (params.matrices.count > 0) {
    bits += ue_bit_length(static_cast<std::uint32_t>(params.matrices.count));
    bits += ue_bit_length(static_cast<std::uint32_t>(params.matrices.rows));
    bits += ue_bit_length(static_cast<std::uint32_t>(params.matrices.cols));
    bits += section_bits(params.matrices.values, state.matrices_q);
  }
  return bits;
}

}  // namespace gfv
