#pragma once

#include <vector>

#include "mrr/types.hpp"

// OpenMP-parallel compute kernels. Serial reference versions live in
// mrr::ref and are compared against these in tests and benchmarks.
// All kernels use static scheduling and fixed reduction orders, so results
// are bit-reproducible for a fixed thread count.
namespace mrr::kernels {

// --- 2D convolution, reflection padding (pad = k/2), NCHW without N ---
// x: [C,H,W], w: [O,C,k,k], b: [O], out: [O,Ho,Wo] with
// Ho = (H + 2*pad - k)/stride + 1.
void conv2d_forward(const double *x, int C, int H, int W, const double *w,
                    const double *b, int O, int k, int stride, double *out);

// gout: [O,Ho,Wo] -> gx: [C,H,W] (overwritten).
void conv2d_grad_input(const double *gout, int O, const double *w, int C, int H,
                       int W, int k, int stride, double *gx);

// gout: [O,Ho,Wo], x: [C,H,W] -> gw: [O,C,k,k], gb: [O] (overwritten).
void conv2d_grad_params(const double *gout, int O, const double *x, int C, int H,
                        int W, int k, int stride, double *gw, double *gb);

inline int conv_out_dim(int in, int k, int stride) {
  return (in + 2 * (k / 2) - k) / stride + 1;
}

// --- SSIM local statistics (valid windows, Gaussian weights) ---
struct SsimStats {
  int hv = 0, wv = 0; // valid-map shape: (H-k+1, W-k+1)
  std::vector<double> mu_x, mu_y, var_x, var_y, cov_xy;
};

// win: k*k weights summing to 1.
SsimStats ssim_stats(const Image2D &x, const Image2D &y, const std::vector<double> &win,
                     int k);

// Transposed window correlation: out[q] = sum over valid positions p with
// q inside the window at p of win[q-p]*src[p]. out: [H,W], src: [Hv,Wv].
void window_correlate_full(const double *src, int hv, int wv,
                           const std::vector<double> &win, int k, double *out, int H,
                           int W);

// --- Kaiser-Bessel gridding ---
// Kernel lookup table over [0, width/2] with linear interpolation.
struct KbTable {
  int width = 0;        // taps
  double step = 0.0;    // table spacing
  std::vector<double> values;

  double operator()(double u) const {
    double a = std::abs(u) / step;
    size_t i = size_t(a);
    if (i + 1 >= values.size()) return 0.0;
    double f = a - double(i);
    return values[i] * (1.0 - f) + values[i + 1] * f;
  }
};

// Gather: sample[j] = sum over grid cells in the kernel footprint around
// (px[j], py[j]) (fine-grid row/col positions, periodic wrap).
void kb_gather(const cplx *grid, int G, const double *prow, const double *pcol, int M,
               const KbTable &tab, cplx *out);

// Scatter (exact transpose of kb_gather). Deterministic per thread count:
// per-thread grids are reduced in thread order.
void kb_scatter(const cplx *samples, int M, const double *prow, const double *pcol,
                const KbTable &tab, cplx *grid, int G);

} // namespace mrr::kernels
