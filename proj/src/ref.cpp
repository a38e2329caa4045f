#include "mrr/ref.hpp"

#include <cmath>
#include <vector>

namespace mrr::ref {
namespace {

// PyTorch-style reflection (edge not repeated): -1 -> 1, H -> H-2.
int reflect(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

} // namespace

ComplexGrid2D direct_dft2(const ComplexGrid2D &in, bool inverse) {
  const int h = in.rows, w = in.cols;
  ComplexGrid2D out(h, w);
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(double(h) * double(w));
  for (int p = 0; p < h; ++p)
    for (int q = 0; q < w; ++q) {
      cplx acc(0.0, 0.0);
      for (int m = 0; m < h; ++m)
        for (int n = 0; n < w; ++n) {
          double ang = 2.0 * M_PI *
                       (double(p - h / 2) * (m - h / 2) / h +
                        double(q - w / 2) * (n - w / 2) / w);
          acc += in.at(m, n) * cplx(std::cos(ang), sign * std::sin(ang));
        }
      out.at(p, q) = acc * scale;
    }
  return out;
}

std::vector<cplx> direct_ndft_forward(const ComplexGrid2D &img,
                                      const std::vector<double> &k_row,
                                      const std::vector<double> &k_col) {
  const int n = img.rows;
  std::vector<cplx> out(k_row.size());
  for (size_t j = 0; j < k_row.size(); ++j) {
    cplx acc(0.0, 0.0);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        double ang = -2.0 * M_PI * (k_row[j] * (r - n / 2) + k_col[j] * (c - n / 2));
        acc += img.at(r, c) * cplx(std::cos(ang), std::sin(ang));
      }
    out[j] = acc / double(n);
  }
  return out;
}

ComplexGrid2D direct_ndft_adjoint(const std::vector<cplx> &samples,
                                  const std::vector<double> &k_row,
                                  const std::vector<double> &k_col, int side) {
  ComplexGrid2D out(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      cplx acc(0.0, 0.0);
      for (size_t j = 0; j < samples.size(); ++j) {
        double ang = 2.0 * M_PI * (k_row[j] * (r - side / 2) + k_col[j] * (c - side / 2));
        acc += samples[j] * cplx(std::cos(ang), std::sin(ang));
      }
      out.at(r, c) = acc / double(side);
    }
  return out;
}

double ssim_scalar(const Image2D &x, const Image2D &y, int window, double sigma,
                   double dynamic_range, double k1, double k2) {
  const int k = window;
  std::vector<double> win(size_t(k) * k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double di = i - (k - 1) / 2.0, dj = j - (k - 1) / 2.0;
      win[size_t(i) * k + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      sum += win[size_t(i) * k + j];
    }
  for (double &v : win) v /= sum;

  const double c1 = (k1 * dynamic_range) * (k1 * dynamic_range);
  const double c2 = (k2 * dynamic_range) * (k2 * dynamic_range);
  const int hv = x.rows - k + 1, wv = x.cols - k + 1;

  double acc = 0.0;
  for (int p = 0; p < hv; ++p)
    for (int q = 0; q < wv; ++q) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          double wgt = win[size_t(i) * k + j];
          double xv = x.at(p + i, q + j), yv = y.at(p + i, q + j);
          mx += wgt * xv;
          my += wgt * yv;
          sxx += wgt * xv * xv;
          syy += wgt * yv * yv;
          sxy += wgt * xv * yv;
        }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      double num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
      double den = (mx * mx + my * my + c1) * (sxx + syy + c2);
      acc += num / den;
    }
  return acc / (double(hv) * wv);
}

void conv2d_forward(const double *x, int C, int H, int W, const double *w,
                    const double *b, int O, int k, int stride, double *out) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
  for (int o = 0; o < O; ++o)
    for (int i = 0; i < ho; ++i)
      for (int j = 0; j < wo; ++j) {
        double acc = b ? b[o] : 0.0;
        for (int c = 0; c < C; ++c)
          for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v) {
              int xi = reflect(i * stride + u - pad, H);
              int xj = reflect(j * stride + v - pad, W);
              acc += w[((size_t(o) * C + c) * k + u) * k + v] *
                     x[(size_t(c) * H + xi) * W + xj];
            }
        out[(size_t(o) * ho + i) * wo + j] = acc;
      }
}

void conv2d_grad_input(const double *gout, int O, const double *w, int C, int H, int W,
                       int k, int stride, double *gx) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
  std::fill(gx, gx + size_t(C) * H * W, 0.0);
  for (int o = 0; o < O; ++o)
    for (int c = 0; c < C; ++c)
      for (int i = 0; i < ho; ++i)
        for (int j = 0; j < wo; ++j) {
          double g = gout[(size_t(o) * ho + i) * wo + j];
          for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v) {
              int xi = reflect(i * stride + u - pad, H);
              int xj = reflect(j * stride + v - pad, W);
              gx[(size_t(c) * H + xi) * W + xj] +=
                  g * w[((size_t(o) * C + c) * k + u) * k + v];
            }
        }
}

void conv2d_grad_params(const double *gout, int O, const double *x, int C, int H, int W,
                        int k, int stride, double *gw, double *gb) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
  std::fill(gw, gw + size_t(O) * C * k * k, 0.0);
  std::fill(gb, gb + O, 0.0);
  for (int o = 0; o < O; ++o)
    for (int i = 0; i < ho; ++i)
      for (int j = 0; j < wo; ++j) {
        double g = gout[(size_t(o) * ho + i) * wo + j];
        gb[o] += g;
        for (int c = 0; c < C; ++c)
          for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v) {
              int xi = reflect(i * stride + u - pad, H);
              int xj = reflect(j * stride + v - pad, W);
              gw[((size_t(o) * C + c) * k + u) * k + v] +=
                  g * x[(size_t(c) * H + xi) * W + xj];
            }
      }
}

} // namespace mrr::ref
