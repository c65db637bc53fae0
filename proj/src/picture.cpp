#include "gfv/picture.hpp"

namespace gfv {

PictureBuffer PictureBuffer::make_rgb(int width, int height, std::uint8_t fill) {
  PictureBuffer pic;
  pic.format = Format::rgb444;
  pic.width = width;
  pic.height = height;
  for (auto& p : pic.plane) {
    p.assign(static_cast<std::size_t>(width) * height, fill);
  }
  return pic;
}

PictureBuffer PictureBuffer::make_yuv420(int width, int height, std::uint8_t luma,
                                         std::uint8_t chroma) {
  PictureBuffer pic;
  pic.format = Format::yuv420;
  pic.width = width;
  pic.height = height;
  pic.plane[0].assign(static_cast<std::size_t>(width) * height, luma);
  const std::size_t csize =
      static_cast<std::size_t>(pic.chroma_width()) * pic.chroma_height();
  pic.plane[1].assign(csize, chroma);
  pic.plane[2].assign(csize, chroma);
  return pic;
}

void PictureBuffer::validate() const {
  if (width < 1 || height < 1) {
    throw ShapeError("picture: dimensions must be positive");
  }
  const std::size_t full = static_cast<std::size_t>(width) * height;
  if (plane[0].size() != full) {
    throw ShapeError("picture: first plane size mismatch");
  }
  const std::size_t rest =
      format == Format::rgb444
          ? full
          : static_cast<std::size_t>(chroma_width()) * chroma_height();
  if (plane[1].size() != rest || plane[2].size() != rest) {
    throw ShapeError("picture: chroma/color plane size mismatch");
  }
}

}  // namespace gfv
