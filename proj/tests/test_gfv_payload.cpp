#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gfv/bitio.hpp"
#include "gfv/gfv_payload.hpp"
#include "test_util.hpp"

using namespace gfv;
using namespace gfv::testutil;

namespace {

// Independent bit-count oracle: re-derives the payload length from the
// documented field list without touching the serializer.
std::size_t oracle_bit_count(const GfvFrameParams& p, const PredictorState& state,
                             const QuantConfig& cfg = {}) {
  const auto ue_len = [](std::uint64_t v) {
    std::size_t z = 0;
    while ((std::uint64_t{1} << (z + 1)) <= v + 1) {
      ++z;
    }
    return 2 * z + 1;
  };
  std::size_t bits = 13;
  if (p.translator_uri || p.generator_uri) {
    const std::size_t lt = p.translator_uri ? p.translator_uri->size() : 0;
    const std::size_t lg = p.generator_uri ? p.generator_uri->size() : 0;
    bits += ue_len(lt) + 8 * lt + ue_len(lg) + 8 * lg;
  }
  const auto value_bits = [&](const std::vector<double>& vals,
                              const std::vector<std::uint32_t>& prev) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::uint32_t q = quantize(vals[i], p.precision_bits, cfg);
      if (p.prediction) {
        const std::int64_t d = static_cast<std::int64_t>(q) - prev[i];
        const std::uint64_t zz = d >= 0 ? 2 * static_cast<std::uint64_t>(d)
                                        : 2 * static_cast<std::uint64_t>(-d) - 1;
        n += ue_len(zz);
      } else {
        n += p.precision_bits;
      }
    }
    return n;
  };
  if (p.coords.count > 0) {
    bits += ue_len(p.coords.count) + 2 + value_bits(p.coords.values, state.coords_q);
  }
  if (p.matrices.count > 0) {
    bits += ue_len(p.matrices.count) + ue_len(p.matrices.rows) + ue_len(p.matrices.cols) +
            value_bits(p.matrices.values, state.matrices_q);
  }
  return bits;
}

GfvFrameParams coords_only(std::size_t n, std::size_t d, unsigned p, double fill = 0.25) {
  GfvFrameParams params;
  params.kind = RepresentationKind::keypoints_2d;
  params.precision_bits = p;
  params.coords.count = n;
  params.coords.dims = d;
  params.coords.values.assign(n * d, fill);
  return params;
}

}  // namespace

TEST_CASE("quantizer hits the documented anchor points") {
  CHECK(quantize(-1.0, 8) == 0);
  CHECK(quantize(1.0, 8) == 255);
  CHECK(quantize(0.0, 8) == 128);  // round(127.5), half away from zero

  CHECK(dequantize(0, 8) == doctest::Approx(-1.0));
  CHECK(dequantize(255, 8) == doctest::Approx(1.0));
  CHECK(dequantize(128, 8) == doctest::Approx(-1.0 + 256.0 / 255.0).epsilon(1e-12));

  QuantStats stats;
  CHECK(quantize(-7.0, 8, {}, &stats) == 0);
  CHECK(quantize(42.0, 8, {}, &stats) == 255);
  CHECK(stats.clamped == 2);

  const QuantConfig wide{-4.0, 4.0};
  CHECK(quantize(4.0, 4, wide) == 15);
  CHECK(quantize(-4.0, 4, wide) == 0);
}

TEST_CASE("quantizer error stays within half a step") {
  std::mt19937 rng(11);
  for (unsigned p : {1u, 2u, 5u, 8u, 12u, 16u}) {
    const double step = 2.0 / ((1u << p) - 1);
    for (int i = 0; i < 2000; ++i) {
      const double v = random_value(rng);
      const double back = dequantize(quantize(v, p), p);
      CHECK(std::abs(v - back) <= step / 2 + 1e-12);
    }
  }
}

TEST_CASE("zigzag maps signed residuals onto unsigned codes") {
  CHECK(zigzag(0) == 0);
  CHECK(zigzag(-1) == 1);
  CHECK(zigzag(1) == 2);
  CHECK(zigzag(-2) == 3);
  CHECK(unzigzag(0) == 0);
  CHECK(unzigzag(1) == -1);
  CHECK(unzigzag(2) == 1);

  std::mt19937 rng(3);
  std::uniform_int_distribution<std::int64_t> dist(-(std::int64_t{1} << 31) + 1,
                                                   (std::int64_t{1} << 31) - 1);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t d = dist(rng);
    CHECK(unzigzag(zigzag(d)) == d);
  }
  CHECK_THROWS_AS(zigzag(std::int64_t{1} << 31), RangeError);
  CHECK_THROWS_AS(zigzag(-(std::int64_t{1} << 31)), RangeError);
}

TEST_CASE("documented payload sizes") {
  PredictorState state;

  // coords only, raw, N=2, D=2, p=8, no URIs: 13 + 3 + 2 + 32 = 50 bits.
  GfvFrameParams two = coords_only(2, 2, 8);
  CHECK(payload_bit_length(two, state) == 50);
  const auto bytes = encode_payload(two, state);
  CHECK(bytes.size() == 7);  // 50 bits + trailing = 56

  // empty no-update message: header only.
  PredictorState empty_state;
  GfvFrameParams none;
  none.kind = RepresentationKind::compact_feature;
  CHECK(payload_bit_length(none, empty_state) == 13);
  CHECK(encode_payload(none, empty_state).size() == 2);

  // matrix-only CFTE-style: M=1, R=4, C=4, p=8 -> 16 entries x 8 = 128 data bits.
  PredictorState mstate;
  GfvFrameParams cfte;
  cfte.kind = RepresentationKind::compact_feature;
  cfte.precision_bits = 8;
  cfte.matrices.count = 1;
  cfte.matrices.rows = 4;
  cfte.matrices.cols = 4;
  cfte.matrices.values.assign(16, 0.5);
  const std::size_t header = 13;
  const std::size_t dims_fields = 3 + 5 + 5;  // ue(1)=010, ue(4)=00101, ue(4)
  CHECK(payload_bit_length(cfte, mstate) == header + dims_fields + 128);

  // static prediction, N=10, D=2: 13 + ue(10)=7 + 2 + 20 x ue(0)=1.
  PredictorState pstate;
  GfvFrameParams ten = coords_only(10, 2, 8);
  encode_payload(ten, pstate);
  ten.prediction = true;
  CHECK(payload_bit_length(ten, pstate) == 13 + 7 + 2 + 20);
}

TEST_CASE("identity prediction codes one bit per value") {
  PredictorState state;
  GfvFrameParams params = coords_only(10, 2, 8);
  encode_payload(params, state);

  PredictorState raw_state = state;
  GfvFrameParams raw = params;
  const std::size_t raw_bits = payload_bit_length(raw, raw_state);

  params.prediction = true;
  const std::size_t pred_bits = payload_bit_length(params, state);
  CHECK(pred_bits - 22 == 20);            // coordinate data section
  CHECK(raw_bits - 22 == 160);            // 20 values x 8 bits
  CHECK((raw_bits - 22) == 8 * (pred_bits - 22));
}

TEST_CASE("prediction-mode data beats raw for static sequences whenever p > 1") {
  for (unsigned p = 2; p <= 16; ++p) {
    PredictorState state;
    GfvFrameParams params = coords_only(6, 2, p);
    encode_payload(params, state);
    params.prediction = true;
    const std::size_t n_values = params.coords.count * params.coords.dims;
    const std::size_t pred_data = payload_bit_length(params, state) - 13 -
                                  ue_bit_length(static_cast<std::uint32_t>(params.coords.count)) - 2;
    CHECK(pred_data == n_values);
    CHECK(pred_data < n_values * p);
  }
}

TEST_CASE("encode/decode round trip preserves quantized integers and headers") {
  std::mt19937 rng(2024);
  const QuantConfig cfg{-1.0, 1.0};
  for (int iter = 0; iter < 3000; ++iter) {
    const RepresentationKind kind = random_kind(rng);
    const unsigned p = 1 + rng() % 16;
    GfvFrameParams params = random_params(rng, kind, p, false, cfg);

    PredictorState enc_state;
    PredictorState dec_state;
    if (rng() % 2 == 0) {
      // Seed both states with a first picture, then difference-code a second.
      GfvFrameParams first = params;
      first.prediction = false;
      const auto first_bytes = encode_payload(first, enc_state, cfg);
      decode_payload(first_bytes, dec_state, cfg);
      jitter_values(rng, params, 0.05, cfg);
      params.prediction = true;
    }

    const auto bytes = encode_payload(params, enc_state, cfg);
    const GfvFrameParams out = decode_payload(bytes, dec_state, cfg);

    CHECK(out.kind == params.kind);
    CHECK(out.precision_bits == params.precision_bits);
    CHECK(out.prediction == params.prediction);
    CHECK(out.translator_uri == params.translator_uri);
    CHECK(out.generator_uri == params.generator_uri);
    CHECK(out.coords.count == params.coords.count);
    CHECK(out.coords.dims == (params.coords.count > 0 ? params.coords.dims : 2));
    CHECK(out.matrices.count == params.matrices.count);
    CHECK(enc_state == dec_state);  // quantized integers agree exactly

    // Decoded reals are the dequantized encoder-side integers.
    for (std::size_t i = 0; i < out.coords.values.size(); ++i) {
      CHECK(out.coords.values[i] == dequantize(enc_state.coords_q[i], p, cfg));
    }
  }
}

TEST_CASE("no-update message is legal and leaves state untouched") {
  PredictorState state;
  GfvFrameParams first = coords_only(3, 2, 8);
  encode_payload(first, state);
  const PredictorState before = state;

  GfvFrameParams none;
  none.kind = RepresentationKind::keypoints_2d;
  const auto bytes = encode_payload(none, state);
  CHECK(state == before);

  PredictorState dec_state = before;
  const GfvFrameParams out = decode_payload(bytes, dec_state);
  CHECK(out.coords.count == 0);
  CHECK(out.matrices.count == 0);
  CHECK(dec_state == before);
}

TEST_CASE("three-picture prediction chain needs the chained state") {
  std::mt19937 rng(8);
  const QuantConfig cfg;
  std::vector<GfvFrameParams> pictures;
  GfvFrameParams base = coords_only(5, 2, 10, 0.1);
  pictures.push_back(base);
  for (int i = 1; i < 3; ++i) {
    GfvFrameParams next = pictures.back();
    jitter_values(rng, next, 0.1, cfg);
    next.prediction = true;
    pictures.push_back(next);
  }

  // Oracle: replay the encoder picture by picture, recording states.
  std::vector<PredictorState> state_after(3);
  std::vector<std::vector<std::uint8_t>> payloads;
  PredictorState enc_state;
  for (int i = 0; i < 3; ++i) {
    payloads.push_back(encode_payload(pictures[i], enc_state, cfg));
    state_after[i] = enc_state;
  }

  // Decoding the third picture with the state from the second succeeds and
  // matches the oracle's chained state.
  PredictorState dec_state;
  decode_payload(payloads[0], dec_state, cfg);
  CHECK(dec_state == state_after[0]);
  decode_payload(payloads[1], dec_state, cfg);
  CHECK(dec_state == state_after[1]);
  PredictorState third = dec_state;
  decode_payload(payloads[2], third, cfg);
  CHECK(third == state_after[2]);

  // Decoding the third picture against the first picture's state diverges
  // from the oracle (wrong reference), or errors if shapes changed.
  PredictorState wrong = state_after[0];
  const GfvFrameParams out = decode_payload(payloads[2], wrong, cfg);
  bool same = wrong == state_after[2];
  CHECK_FALSE(same);
  (void)out;
}

TEST_CASE("prediction misuse raises distinct errors") {
  PredictorState fresh;
  GfvFrameParams params = coords_only(4, 2, 8);
  params.prediction = true;
  CHECK_THROWS_AS(encode_payload(params, fresh), PredictorError);

  PredictorState seeded;
  GfvFrameParams first = coords_only(4, 2, 8);
  encode_payload(first, seeded);
  GfvFrameParams wrong_shape = coords_only(5, 2, 8);
  wrong_shape.prediction = true;
  CHECK_THROWS_AS(encode_payload(wrong_shape, seeded), ShapeError);

  GfvFrameParams no_matrix_ref;
  no_matrix_ref.kind = RepresentationKind::compact_feature;
  no_matrix_ref.prediction = true;
  no_matrix_ref.matrices.count = 1;
  no_matrix_ref.matrices.rows = 2;
  no_matrix_ref.matrices.cols = 2;
  no_matrix_ref.matrices.values.assign(4, 0.0);
  CHECK_THROWS_AS(encode_payload(no_matrix_ref, seeded), PredictorError);
}

TEST_CASE("decoder rejects malformed payloads with distinct errors") {
  PredictorState state;
  GfvFrameParams params = coords_only(4, 2, 8);
  const auto bytes = encode_payload(params, state);

  // Truncation inside a fixed-width value field.
  PredictorState s1;
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 4);
  CHECK_THROWS_AS(decode_payload(cut, s1), TruncationError);

  // Truncation inside the num_coords code.
  PredictorState s1b;
  std::vector<std::uint8_t> cut2(bytes.begin(), bytes.begin() + 2);
  CHECK_THROWS_AS(decode_payload(cut2, s1b), MalformedCodeError);

  // Forbidden dims: D=1. Header 13 bits: tag 0001, flags 100, p-1 00111, uri 0.
  BitWriter w;
  w.put_bits(1, 4);
  w.put_bits(1, 1);
  w.put_bits(0, 1);
  w.put_bits(0, 1);
  w.put_bits(7, 5);
  w.put_bits(0, 1);
  w.put_ue(1);        // one coordinate
  w.put_bits(1, 2);   // dims = 1, illegal
  w.put_bits(0xAB, 8);
  w.put_bits(0xCD, 8);
  w.put_rbsp_trailing();
  PredictorState s2;
  CHECK_THROWS_AS(decode_payload(w.bytes(), s2), DecodeError);

  // Unknown kind tag.
  BitWriter bad_tag;
  bad_tag.put_bits(12, 4);
  bad_tag.put_bits(0, 4);
  bad_tag.put_bits(7, 5);
  bad_tag.put_bits(0, 1);
  bad_tag.put_rbsp_trailing();
  PredictorState s3;
  CHECK_THROWS_AS(decode_payload(bad_tag.bytes(), s3), DecodeError);

  // Prediction with an invalid state.
  GfvFrameParams pred = coords_only(4, 2, 8);
  PredictorState enc;
  encode_payload(pred, enc);
  pred.prediction = true;
  const auto pred_bytes = encode_payload(pred, enc);
  PredictorState s4;
  CHECK_THROWS_AS(decode_payload(pred_bytes, s4), PredictorError);
}

TEST_CASE("payload_bit_length agrees with the serializer on random inputs") {
  std::mt19937 rng(99);
  const QuantConfig cfg;
  for (int iter = 0; iter < 10000; ++iter) {
    const RepresentationKind kind = random_kind(rng);
    const unsigned p = 1 + rng() % 16;
    GfvFrameParams params = random_params(rng, kind, p, false, cfg);

    PredictorState state;
    if (rng() % 2 == 0 && (params.coords.count > 0 || params.matrices.count > 0)) {
      GfvFrameParams first = params;
      encode_payload(first, state, cfg);
      jitter_values(rng, params, 0.03, cfg);
      params.prediction = true;
    }

    PredictorState for_length = state;
    const std::size_t analytic = payload_bit_length(params, for_length, cfg);
    CHECK(for_length == state);  // length query must not advance the predictor

    const std::size_t oracle = oracle_bit_count(params, state, cfg);
    PredictorState for_encode = state;
    const auto bytes = encode_payload(params, for_encode, cfg);

    CHECK(analytic == oracle);
    // Serialized size is the analytic length plus trailing, rounded to bytes.
    CHECK(bytes.size() == (analytic + 1 + 7) / 8);
  }
}

TEST_CASE("kind taxonomy follows the representation table") {
  CHECK(uses_coordinates(RepresentationKind::landmarks_2d));
  CHECK_FALSE(uses_matrices(RepresentationKind::landmarks_2d));
  CHECK(uses_coordinates(RepresentationKind::keypoints_2d));
  CHECK_FALSE(uses_matrices(RepresentationKind::keypoints_2d));
  CHECK(uses_coordinates(RepresentationKind::keypoints_2d_affine));
  CHECK(uses_matrices(RepresentationKind::keypoints_2d_affine));
  CHECK(uses_coordinates(RepresentationKind::keypoints_3d_pose));
  CHECK(uses_matrices(RepresentationKind::keypoints_3d_pose));
  CHECK_FALSE(uses_coordinates(RepresentationKind::compact_feature));
  CHECK(uses_matrices(RepresentationKind::compact_feature));
  CHECK_FALSE(uses_coordinates(RepresentationKind::facial_semantics));
  CHECK(uses_matrices(RepresentationKind::facial_semantics));
  CHECK_FALSE(uses_coordinates(RepresentationKind::progressive_tokens));
  CHECK(uses_matrices(RepresentationKind::progressive_tokens));

  for (unsigned i = 0; i < kRepresentationKindCount; ++i) {
    const auto kind = static_cast<RepresentationKind>(i);
    CHECK(uses_coordinates(kind) + uses_matrices(kind) >= 1);
    CHECK(kind_from_string(to_string(kind)) == kind);
  }
  CHECK_FALSE(kind_from_string("NOT_A_KIND").has_value());
}

TEST_CASE("encoder validates input shapes") {
  PredictorState state;
  GfvFrameParams bad_kind;
  bad_kind.kind = RepresentationKind::compact_feature;
  bad_kind.coords.count = 2;
  bad_kind.coords.dims = 2;
  bad_kind.coords.values.assign(4, 0.0);
  CHECK_THROWS_AS(encode_payload(bad_kind, state), ShapeError);

  GfvFrameParams bad_size = coords_only(3, 2, 8);
  bad_size.coords.values.pop_back();
  CHECK_THROWS_AS(encode_payload(bad_size, state), ShapeError);

  GfvFrameParams bad_precision = coords_only(1, 2, 8);
  bad_precision.precision_bits = 0;
  CHECK_THROWS_AS(encode_payload(bad_precision, state), RangeError);
  bad_precision.precision_bits = 33;
  CHECK_THROWS_AS(encode_payload(bad_precision, state), RangeError);
}
