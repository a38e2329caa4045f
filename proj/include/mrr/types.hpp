#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrr {

using cplx = std::complex<double>;

/// Complex-valued H x W grid, row-major. Holds both image-domain data and
/// Cartesian k-space.
struct ComplexGrid2D {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;

  ComplexGrid2D() = default;
  ComplexGrid2D(int r, int c) : rows(r), cols(c), data(size_t(r) * c) {
    if (r < 8 || c < 8) throw std::invalid_argument("ComplexGrid2D: dims must be >= 8");
  }

  cplx &at(int r, int c) { return data[size_t(r) * cols + c]; }
  const cplx &at(int r, int c) const { return data[size_t(r) * cols + c]; }
  size_t size() const { return data.size(); }
};

/// Real-valued H x W grid, row-major. Normalized magnitude images live in
/// [0,1]; intermediates (raw magnitudes, gradients) may exceed that.
struct Image2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Image2D() = default;
  Image2D(int r, int c, double fill = 0.0) : rows(r), cols(c), data(size_t(r) * c, fill) {
    if (r < 1 || c < 1) throw std::invalid_argument("Image2D: dims must be positive");
  }

  double &at(int r, int c) { return data[size_t(r) * cols + c]; }
  const double &at(int r, int c) const { return data[size_t(r) * cols + c]; }
  size_t size() const { return data.size(); }
};

/// Stack of equally shaped slices plus voxel spacing in millimetres.
struct Volume {
  std::vector<Image2D> slices;
  double voxel_mm[3] = {1.0, 1.0, 1.0};

  int rows() const { return slices.empty() ? 0 : slices.front().rows; }
  int cols() const { return slices.empty() ? 0 : slices.front().cols; }
};

inline void require_same_shape(const Image2D &a, const Image2D &b, const char *what) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

} // namespace mrr
