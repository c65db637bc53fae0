#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gfv/errors.hpp"
#include "gfv/gfv_payload.hpp"
#include "gfv/picture.hpp"

namespace gfv {

/// One fully-connected layer: y[j] = bias[j] + sum_i x[i] * weights[i*cols + j].
/// rows is the input width, cols the output width.
struct MlpLayer {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> weights;  // rows * cols, row-major
  std::vector<float> bias;     // cols
};

/// Layered fully-connected weights. The reference translator topology is a
/// trans-encoder of 4 layers followed by a trans-decoder of 4 layers with
/// hidden and latent width 256.
struct MlpWeights {
  std::vector<MlpLayer> layers;

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  /// Throws WeightsError(chain_break) when adjacent layer dimensions do not
  /// chain, ShapeError when a layer's buffers disagree with its dims.
  void validate() const;
};

constexpr std::size_t kTranslatorWidth = 256;
constexpr std::size_t kTranslatorStackDepth = 4;  // layers per trans-en/decoder

/// Dimension chain of the reference translator: input -> width x 7 -> output
/// (8 layers; the latent after layer 4 has the same width).
std::vector<std::size_t> translator_layer_dims(std::size_t input_dim, std::size_t output_dim,
                                               std::size_t width = kTranslatorWidth);

/// Builds a translator-topology weight set from a flat list of dims, filled
/// by the supplied generator (called once per weight/bias element).
MlpWeights make_mlp(const std::vector<std::size_t>& dims,
                    const std::function<float()>& next_value);

/// Forward pass: ReLU after every layer except the last.
std::vector<float> mlp_forward(std::span<const float> x, const MlpWeights& w);

/// Weights file: magic "GFVT", version 0x01, layer count u32le, then per-layer
/// (rows u32le, cols u32le) for all layers, then per-layer row-major float32le
/// weights followed by float32le bias.
MlpWeights load_weights(const std::filesystem::path& path);
void save_weights(const MlpWeights& w, const std::filesystem::path& path);

/// Identifies a translator or generator network by URI.
struct NetworkDescriptor {
  enum class Role { translator, generator };
  std::string uri;
  Role role = Role::translator;
};

/// Target shape for parameter translation.
struct ParamShape {
  std::size_t coord_count = 0;
  std::size_t coord_dims = 2;
  std::size_t mat_count = 0;
  std::size_t mat_rows = 0;
  std::size_t mat_cols = 0;

  std::size_t flat_size() const {
    return coord_count * coord_dims + mat_count * mat_rows * mat_cols;
  }
};

/// Row-major flattening: coordinates first, then matrices.
std::vector<double> flatten_params(const GfvFrameParams& params);

/// Inverse of flatten_params for the given kind and shape.
GfvFrameParams unflatten_params(RepresentationKind kind, const ParamShape& shape,
                                std::span<const double> values);

/// Converts parameters into target_kind's shape: flatten, run the network,
/// unflatten. Coding controls (precision, prediction) carry over from src.
GfvFrameParams translate(const GfvFrameParams& src, const MlpWeights& w,
                         RepresentationKind target_kind, const ParamShape& target_shape);

/// Per-pixel forward motion vectors, pixel units.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> dx;  // width * height
  std::vector<float> dy;

  float at_dx(int x, int y) const { return dx[static_cast<std::size_t>(y) * width + x]; }
  float at_dy(int x, int y) const { return dy[static_cast<std::size_t>(y) * width + x]; }
};

/// Gaussian-weighted keypoint motion: flow(p) = sum_k w_k(p) (cur_k - base_k)
/// with w_k(p) proportional to exp(-|p - base_k|^2 / (2 sigma^2)), normalized
/// over k. Keypoints are (x, y) pairs in [-1, 1], mapped to pixel centers;
/// sigma is in pixels.
FlowField toy_dense_motion(std::span<const double> base_kps, std::span<const double> cur_kps,
                           int width, int height, double sigma);

/// Backward warp with bilinear sampling: out(p) = img(p - flow(p)), samples
/// clamped to the picture border. img must be RGB 4:4:4.
PictureBuffer warp_bilinear(const PictureBuffer& img, const FlowField& flow);

}  // namespace gfv
