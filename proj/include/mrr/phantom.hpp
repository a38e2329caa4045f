#pragma once

#include "mrr/types.hpp"

namespace mrr {

/// Classic head phantom (sum of ellipses), values in [0,1].
Image2D shepp_logan(int side);

/// Smooth sum-of-Gaussians phantom, values in [0,1], max 1. Useful where
/// Gibbs ringing would dominate a round-trip comparison.
Image2D smooth_phantom(int side);

/// Stack of phantoms with per-slice geometric variation.
Volume phantom_volume(int side, int num_slices, bool smooth = false);

} // namespace mrr
