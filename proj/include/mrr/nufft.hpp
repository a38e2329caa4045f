#pragma once

#include "mrr/kernels.hpp"
#include "mrr/sampling.hpp"
#include "mrr/types.hpp"

namespace mrr {

/// Complex sample values along a trajectory, spoke-major.
struct SampleVector {
  int num_spokes = 0;
  int samples_per_spoke = 0;
  std::vector<cplx> values;

  int size() const { return num_spokes * samples_per_spoke; }
};

/// Precomputed state for the oversampled Kaiser-Bessel gridding transform.
/// Immutable after construction and shareable across threads.
struct NufftPlan {
  int image_side = 0;
  double oversample = 2.0;
  int kernel_width = 6;
  int grid_side = 0;
  RadialTrajectory traj;
  kernels::KbTable table;
  std::vector<double> deapod;   // image_side^2, multiply form, strictly positive
  std::vector<double> pos_row;  // per-sample fine-grid position
  std::vector<double> pos_col;
};

/// Build a plan. Throws on odd image_side, oversample < 1.25,
/// kernel_width < 4, or trajectory coordinates outside [-0.5, 0.5).
NufftPlan plan_nufft(int image_side, const RadialTrajectory &traj, double oversample = 2.0,
                     int kernel_width = 6);

/// Type-2 transform: s_j ~ (1/N) * sum_n x_n exp(-2i*pi*k_j.r_n), matching
/// fft2c scaling at on-grid frequencies.
SampleVector nufft_forward(const NufftPlan &plan, const ComplexGrid2D &img);

/// Exact algebraic adjoint of nufft_forward.
ComplexGrid2D nufft_adjoint(const NufftPlan &plan, const SampleVector &samples);

/// Ramp density-compensation weights; the center sample gets the half-pixel
/// value 1/(2*samples_per_spoke). Normalized so that the fully sampled
/// adjoint(dcf * forward(x)) round trip is unbiased (assumes the standard
/// 2x readout oversampling, samples_per_spoke = 2*image_side).
std::vector<double> dcf_radial(const RadialTrajectory &traj);

/// Elementwise weight application, w real.
SampleVector apply_dcf(const SampleVector &s, const std::vector<double> &w);

} // namespace mrr
