#pragma once

#include "mrr/types.hpp"

// Serial reference implementations. These are deliberately naive and share
// no code with the production kernels; tests use them as independent
// oracles and the benchmark target compares against them.
namespace mrr::ref {

/// Centered orthonormal 2D DFT by direct O(N^4) summation.
ComplexGrid2D direct_dft2(const ComplexGrid2D &in, bool inverse);

/// Direct non-uniform DFT: s_j = (1/N) sum_n x_n exp(-2i*pi*k_j.r_n), with
/// r_n the centered integer pixel coordinate.
std::vector<cplx> direct_ndft_forward(const ComplexGrid2D &img,
                                      const std::vector<double> &k_row,
                                      const std::vector<double> &k_col);

/// Adjoint of direct_ndft_forward.
ComplexGrid2D direct_ndft_adjoint(const std::vector<cplx> &samples,
                                  const std::vector<double> &k_row,
                                  const std::vector<double> &k_col, int side);

/// Scalar-loop SSIM: per valid window position, Gaussian-weighted local
/// means/variances/covariance plugged straight into the similarity formula;
/// returns the mean over the map.
double ssim_scalar(const Image2D &x, const Image2D &y, int window = 11,
                   double sigma = 1.5, double dynamic_range = 1.0, double k1 = 0.01,
                   double k2 = 0.03);

/// Naive serial 2D convolution with reflection padding, same contract as
/// kernels::conv2d_forward.
void conv2d_forward(const double *x, int C, int H, int W, const double *w,
                    const double *b, int O, int k, int stride, double *out);

void conv2d_grad_input(const double *gout, int O, const double *w, int C, int H, int W,
                       int k, int stride, double *gx);

void conv2d_grad_params(const double *gout, int O, const double *x, int C, int H, int W,
                        int k, int stride, double *gw, double *gb);

} // namespace mrr::ref
