#pragma once

#include <cstdint>

#include "mrr/nufft.hpp"
#include "mrr/sampling.hpp"
#include "mrr/types.hpp"

namespace mrr {

struct DcConfig {
  int fs_spokes_multiplier = 2; // radial Omega_FS spokes = multiplier * image side
};

/// Keep measured k-space at sampled locations, fill the rest from the
/// network estimate: clip01(|ifft2c(mask o measured + (1-mask) o
/// fft2c(net_out))|). Sampled entries of the combined grid equal measured
/// bit for bit.
Image2D dc_cartesian(const Image2D &net_out, const ComplexGrid2D &measured,
                     const CartesianMask &mask);

/// Radial consistency through the fully sampled golden-angle pattern:
/// forward-transform the network output along Omega_FS, overwrite the
/// spokes whose angles match traj_us with the measured data, apply the
/// Omega_FS DCF and come back through the adjoint. traj_us must be a prefix
/// of the same golden-angle sequence.
Image2D dc_radial(const Image2D &net_out, const SampleVector &measured,
                  const RadialTrajectory &traj_us, const DcConfig &cfg = {});

namespace dc_stats {
/// Process-wide invocation counter; lets tests assert that training never
/// routes through data consistency.
uint64_t invocations();
}

} // namespace mrr
