#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gfv/errors.hpp"

namespace gfv {

/// 8-bit picture, either RGB 4:4:4 (planes R, G, B at full resolution) or
/// YCbCr 4:2:0 (planes Y, Cb, Cr; chroma half size, rounded up).
struct PictureBuffer {
  enum class Format { rgb444, yuv420 };

  Format format = Format::rgb444;
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> plane;

  static PictureBuffer make_rgb(int width, int height, std::uint8_t fill = 0);
  static PictureBuffer make_yuv420(int width, int height, std::uint8_t luma = 0,
                                   std::uint8_t chroma = 128);

  int chroma_width() const { return (width + 1) / 2; }
  int chroma_height() const { return (height + 1) / 2; }

  /// Throws ShapeError unless plane sizes match format and dimensions.
  void validate() const;

  bool operator==(const PictureBuffer&) const = default;
};

}  // namespace gfv
