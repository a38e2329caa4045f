#include "mrr/dc.hpp"

#include <atomic>
#include <cmath>

#include "mrr/errors.hpp"
#include "mrr/fft.hpp"

namespace mrr {
namespace {

std::atomic<uint64_t> g_dc_calls{0};

} // namespace

namespace dc_stats {
uint64_t invocations() { return g_dc_calls.load(); }
}

Image2D dc_cartesian(const Image2D &net_out, const ComplexGrid2D &measured,
                     const CartesianMask &mask) {
  g_dc_calls.fetch_add(1);
  if (net_out.rows != measured.rows || net_out.cols != measured.cols ||
      net_out.rows != mask.rows || net_out.cols != mask.cols)
    throw InvalidInputError("dc_cartesian: shape mismatch");

  ComplexGrid2D estimated = fft2c(to_complex(net_out));
  ComplexGrid2D combined(net_out.rows, net_out.cols);
  for (int r = 0; r < combined.rows; ++r)
    for (int c = 0; c < combined.cols; ++c)
      combined.at(r, c) = mask.at(r, c) ? measured.at(r, c) : estimated.at(r, c);
  return clip01(magnitude(ifft2c(combined)));
}

Image2D dc_radial(const Image2D &net_out, const SampleVector &measured,
                  const RadialTrajectory &traj_us, const DcConfig &cfg) {
  g_dc_calls.fetch_add(1);
  if (net_out.rows != net_out.cols)
    throw InvalidInputError("dc_radial: image must be square");
  if (cfg.fs_spokes_multiplier < 1)
    throw ConfigError("dc_radial: fs_spokes_multiplier must be >= 1");
  if (measured.num_spokes != traj_us.num_spokes ||
      measured.samples_per_spoke != traj_us.samples_per_spoke)
    throw InvalidInputError("dc_radial: measured data does not match trajectory");

  const int side = net_out.rows;
  const int fs_spokes = cfg.fs_spokes_multiplier * side;
  if (traj_us.num_spokes > fs_spokes)
    throw InvalidInputError("dc_radial: more measured spokes than the full pattern");

  // An empty measured set still round-trips the network output through the
  // full pattern; fall back to the standard 2x readout length.
  const int sps = traj_us.samples_per_spoke >= 2 ? traj_us.samples_per_spoke : 2 * side;
  RadialTrajectory traj_fs = gen_golden_radial(fs_spokes, sps, traj_us.start_angle_deg);
  // The undersampled pattern must be the leading spokes of the same
  // golden-angle sequence; angle equality within 1e-9 degrees.
  for (int s = 0; s < traj_us.num_spokes; ++s)
    if (std::abs(traj_fs.angles_deg[s] - traj_us.angles_deg[s]) > 1e-9)
      throw InvalidInputError(
          "dc_radial: trajectory is not a prefix of the full golden-angle pattern "
          "(spoke " + std::to_string(s) + ")");

  NufftPlan plan_fs = plan_nufft(side, traj_fs);
  SampleVector s_fs = nufft_forward(plan_fs, to_complex(net_out));
  const size_t measured_len = size_t(traj_us.num_spokes) * traj_us.samples_per_spoke;
  for (size_t i = 0; i < measured_len; ++i) s_fs.values[i] = measured.values[i];

  SampleVector weighted = apply_dcf(s_fs, dcf_radial(traj_fs));
  return clip01(magnitude(nufft_adjoint(plan_fs, weighted)));
}

} // namespace mrr
