#include "mrr/undersample.hpp"

#include "mrr/errors.hpp"
#include "mrr/fft.hpp"

namespace mrr {

CartesianSample undersample_cartesian(const Image2D &gt, const CartesianMask &mask) {
  if (gt.rows != mask.rows || gt.cols != mask.cols)
    throw InvalidInputError("undersample_cartesian: image/mask shape mismatch");

  CartesianSample s;
  s.ground_truth = gt;
  s.mask = mask;

  ComplexGrid2D full = fft2c(to_complex(gt));
  s.measured_kspace = ComplexGrid2D(gt.rows, gt.cols);
  for (int r = 0; r < gt.rows; ++r)
    for (int c = 0; c < gt.cols; ++c)
      s.measured_kspace.at(r, c) = mask.at(r, c) ? full.at(r, c) : cplx(0.0, 0.0);

  s.zero_filled = clip01(magnitude(ifft2c(s.measured_kspace)));
  return s;
}

RadialSample undersample_radial(const Image2D &gt, const RadialTrajectory &traj) {
  if (gt.rows != gt.cols)
    throw InvalidInputError("undersample_radial: image must be square");

  RadialSample s;
  s.ground_truth = gt;
  s.traj_us = traj;

  NufftPlan plan = plan_nufft(gt.rows, traj);
  s.measured_spokes = nufft_forward(plan, to_complex(gt));

  SampleVector weighted = apply_dcf(s.measured_spokes, dcf_radial(traj));
  s.aliased = clip01(magnitude(nufft_adjoint(plan, weighted)));
  return s;
}

} // namespace mrr
