#include <algorithm>
#include <cmath>

#include "mrr/kernels.hpp"

namespace mrr::kernels {

SsimStats ssim_stats(const Image2D &x, const Image2D &y, const std::vector<double> &win,
                     int k) {
  SsimStats st;
  st.hv = x.rows - k + 1;
  st.wv = x.cols - k + 1;
  const size_t n = size_t(st.hv) * st.wv;
  st.mu_x.resize(n);
  st.mu_y.resize(n);
  st.var_x.resize(n);
  st.var_y.resize(n);
  st.cov_xy.resize(n);

#pragma omp parallel for schedule(static)
  for (int p = 0; p < st.hv; ++p)
    for (int q = 0; q < st.wv; ++q) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < k; ++i) {
        const double *xr = &x.at(p + i, q);
        const double *yr = &y.at(p + i, q);
        const double *wr = &win[size_t(i) * k];
        for (int j = 0; j < k; ++j) {
          double wgt = wr[j];
          mx += wgt * xr[j];
          my += wgt * yr[j];
          sxx += wgt * xr[j] * xr[j];
          syy += wgt * yr[j] * yr[j];
          sxy += wgt * xr[j] * yr[j];
        }
      }
      size_t idx = size_t(p) * st.wv + q;
      st.mu_x[idx] = mx;
      st.mu_y[idx] = my;
      st.var_x[idx] = sxx - mx * mx;
      st.var_y[idx] = syy - my * my;
      st.cov_xy[idx] = sxy - mx * my;
    }
  return st;
}

void window_correlate_full(const double *src, int hv, int wv,
                           const std::vector<double> &win, int k, double *out, int H,
                           int W) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const int p0 = std::max(0, r - k + 1), p1 = std::min(hv - 1, r);
      const int q0 = std::max(0, c - k + 1), q1 = std::min(wv - 1, c);
      double acc = 0.0;
      for (int p = p0; p <= p1; ++p)
        for (int q = q0; q <= q1; ++q)
          acc += win[size_t(r - p) * k + (c - q)] * src[size_t(p) * wv + q];
      out[size_t(r) * W + c] = acc;
    }
}

} // namespace mrr::kernels
