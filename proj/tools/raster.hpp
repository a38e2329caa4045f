#pragma once

#include <string>
#include <vector>

#include "mrr/types.hpp"

namespace mrr::raster {

/// 8-bit grayscale canvas.
struct Canvas {
  int rows = 0, cols = 0;
  std::vector<uint8_t> pix;

  Canvas(int r, int c, uint8_t fill = 0) : rows(r), cols(c), pix(size_t(r) * c, fill) {}
  void set(int r, int c, uint8_t v) {
    if (r >= 0 && r < rows && c >= 0 && c < cols) pix[size_t(r) * cols + c] = v;
  }
};

/// Render text with the built-in 5x7 font (uppercased; unknown glyphs blank).
void draw_text(Canvas &cv, int row, int col, const std::string &text, uint8_t value);

/// [0,1] image into the canvas at (row, col), 255 = 1.0.
void blit_image(Canvas &cv, int row, int col, const Image2D &img);

/// Binary PGM (P5); byte-deterministic for fixed input.
void write_pgm(const std::string &path, const Canvas &cv);

/// Side-by-side panels with a label strip underneath each.
Canvas montage(const std::vector<Image2D> &panels, const std::vector<std::string> &labels);

} // namespace mrr::raster
