#include "mrr/phantom.hpp"

#include <algorithm>
#include <cmath>

namespace mrr {
namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Modified (Toft) intensity variant of the standard head phantom.
constexpr Ellipse kHead[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

Image2D render_ellipses(int side, double scale) {
  Image2D img(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      // y grows upward in the phantom's coordinate frame.
      double x = (2.0 * c - side + 1.0) / side;
      double y = -(2.0 * r - side + 1.0) / side;
      double v = 0.0;
      for (const Ellipse &e : kHead) {
        double phi = e.phi_deg * M_PI / 180.0;
        double ct = std::cos(phi), st = std::sin(phi);
        double dx = x - e.x0 * scale, dy = y - e.y0 * scale;
        double xr = (dx * ct + dy * st) / (e.a * scale);
        double yr = (-dx * st + dy * ct) / (e.b * scale);
        if (xr * xr + yr * yr <= 1.0) v += e.value;
      }
      img.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  return img;
}

} // namespace

Image2D shepp_logan(int side) { return render_ellipses(side, 1.0); }

Image2D smooth_phantom(int side) {
  struct Blob {
    double amp, x0, y0, s;
  };
  constexpr Blob blobs[] = {
      {0.9, 0.0, 0.0, 0.45},
      {0.5, 0.3, -0.2, 0.18},
      {-0.35, -0.25, 0.25, 0.22},
      {0.4, -0.1, -0.35, 0.15},
  };
  Image2D img(side, side);
  double mx = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      double x = (2.0 * c - side + 1.0) / side;
      double y = -(2.0 * r - side + 1.0) / side;
      double v = 0.0;
      for (const Blob &b : blobs) {
        double d2 = (x - b.x0) * (x - b.x0) + (y - b.y0) * (y - b.y0);
        v += b.amp * std::exp(-d2 / (2.0 * b.s * b.s));
      }
      v = std::max(v, 0.0);
      img.at(r, c) = v;
      mx = std::max(mx, v);
    }
  for (double &v : img.data) v = std::min(v / mx, 1.0);
  return img;
}

Volume phantom_volume(int side, int num_slices, bool smooth) {
  Volume vol;
  vol.slices.reserve(num_slices);
  for (int s = 0; s < num_slices; ++s) {
    if (smooth) {
      vol.slices.push_back(smooth_phantom(side));
    } else {
      // Shrink the anatomy toward the volume ends.
      double t = num_slices > 1 ? double(s) / (num_slices - 1) : 0.5;
      double scale = 0.85 + 0.15 * std::sin(M_PI * t);
      vol.slices.push_back(render_ellipses(side, scale));
    }
  }
  return vol;
}

} // namespace mrr
