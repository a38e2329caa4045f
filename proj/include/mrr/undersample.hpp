#pragma once

#include "mrr/nufft.hpp"
#include "mrr/sampling.hpp"
#include "mrr/types.hpp"

namespace mrr {

/// A Cartesian training/evaluation triple. measured_kspace is exactly
/// mask o fft2c(ground_truth); zero_filled is the clipped magnitude of its
/// zero-filled inverse transform.
struct CartesianSample {
  Image2D ground_truth;
  Image2D zero_filled;
  ComplexGrid2D measured_kspace;
  CartesianMask mask;
};

/// The radial counterpart: measured spokes through the forward NUFFT and an
/// aliased image through DCF + adjoint.
struct RadialSample {
  Image2D ground_truth;
  Image2D aliased;
  SampleVector measured_spokes;
  RadialTrajectory traj_us;
};

CartesianSample undersample_cartesian(const Image2D &gt, const CartesianMask &mask);

RadialSample undersample_radial(const Image2D &gt, const RadialTrajectory &traj);

} // namespace mrr
