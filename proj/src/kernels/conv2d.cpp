#include <algorithm>
#include <cstring>

#include "mrr/kernels.hpp"

namespace mrr::kernels {
namespace {

inline int reflect(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

} // namespace

void conv2d_forward(const double *x, int C, int H, int W, const double *w,
                    const double *b, int O, int k, int stride, double *out) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
  // Each output channel is written by exactly one thread.
#pragma omp parallel for schedule(static)
  for (int o = 0; o < O; ++o) {
    double *dst = out + size_t(o) * ho * wo;
    std::fill(dst, dst + size_t(ho) * wo, b ? b[o] : 0.0);
    for (int c = 0; c < C; ++c) {
      const double *xc = x + size_t(c) * H * W;
      const double *wc = w + (size_t(o) * C + c) * k * k;
      for (int i = 0; i < ho; ++i)
        for (int u = 0; u < k; ++u) {
          const int xi = reflect(i * stride + u - pad, H);
          const double *xrow = xc + size_t(xi) * W;
          const double *wrow = wc + size_t(u) * k;
          double *orow = dst + size_t(i) * wo;
          for (int j = 0; j < wo; ++j) {
            double acc = 0.0;
            for (int v = 0; v < k; ++v) acc += wrow[v] * xrow[reflect(j * stride + v - pad, W)];
            orow[j] += acc;
          }
        }
    }
  }
}

void conv2d_grad_input(const double *gout, int O, const double *w, int C, int H, int W,
                       int k, int stride, double *gx) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
  // Each input-channel slice is owned by one thread, so the reflected
  // scatter never races and the accumulation order is fixed.
#pragma omp parallel for schedule(static)
  for (int c = 0; c < C; ++c) {
    double *gc = gx + size_t(c) * H * W;
    std::fill(gc, gc + size_t(H) * W, 0.0);
    for (int o = 0; o < O; ++o) {
      const double *go = gout + size_t(o) * ho * wo;
      const double *wc = w + (size_t(o) * C + c) * k * k;
      for (int i = 0; i < ho; ++i)
        for (int u = 0; u < k; ++u) {
          const int xi = reflect(i * stride + u - pad, H);
          double *grow = gc + size_t(xi) * W;
          const double *wrow = wc + size_t(u) * k;
          const double *gorow = go + size_t(i) * wo;
          for (int j = 0; j < wo; ++j) {
            const double g = gorow[j];
            for (int v = 0; v < k; ++v) grow[reflect(j * stride + v - pad, W)] += g * wrow[v];
          }
        }
    }
  }
}

void conv2d_grad_params(const double *gout, int O, const double *x, int C, int H, int W,
                        int k, int stride, double *gw, double *gb) {
  const int pad = k / 2;
  const int ho = (H + 2 * pad - k) / stride + 1;
  const int wo = (W + 2 * pad - k) / stride + 1;
#pragma omp parallel for schedule(static)
  for (int o = 0; o < O; ++o) {
    const double *go = gout + size_t(o) * ho * wo;
    double acc_b = 0.0;
    for (size_t i = 0; i < size_t(ho) * wo; ++i) acc_b += go[i];
    gb[o] = acc_b;
    for (int c = 0; c < C; ++c) {
      const double *xc = x + size_t(c) * H * W;
      double *wc = gw + (size_t(o) * C + c) * k * k;
      std::fill(wc, wc + size_t(k) * k, 0.0);
      for (int i = 0; i < ho; ++i)
        for (int u = 0; u < k; ++u) {
          const int xi = reflect(i * stride + u - pad, H);
          const double *xrow = xc + size_t(xi) * W;
          const double *gorow = go + size_t(i) * wo;
          double *wrow = wc + size_t(u) * k;
          for (int j = 0; j < wo; ++j) {
            const double g = gorow[j];
            for (int v = 0; v < k; ++v) wrow[v] += g * xrow[reflect(j * stride + v - pad, W)];
          }
        }
    }
  }
}

} // namespace mrr::kernels
