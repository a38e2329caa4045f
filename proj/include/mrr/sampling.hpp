#pragma once

#include <cstdint>
#include <vector>

namespace mrr {

enum class MaskKind : uint8_t { Varden1D = 1, Varden2D = 2, Uniform = 3 };

/// Boolean Cartesian sampling pattern. For Varden1D/Uniform whole
/// phase-encode lines (columns) are sampled, so each column is constant
/// along the readout direction.
struct CartesianMask {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> keep; // row-major, 1 = sampled
  MaskKind kind = MaskKind::Varden1D;
  uint64_t seed = 0;
  double requested_fraction = 1.0;

  bool at(int r, int c) const { return keep[size_t(r) * cols + c] != 0; }
  void set(int r, int c, bool v) { keep[size_t(r) * cols + c] = v ? 1 : 0; }
  size_t num_sampled() const;
  double sampled_fraction() const;
};

/// Golden-angle stack of centered diameter spokes. Coordinates are
/// normalized spatial frequencies in [-0.5, 0.5) cycles/pixel; angles are
/// kept in exact decimal degrees and converted to radians only when the
/// sample coordinates are computed.
struct RadialTrajectory {
  int num_spokes = 0;
  int samples_per_spoke = 0;
  double start_angle_deg = 0.0;
  std::vector<double> angles_deg; // per spoke
  std::vector<double> k_row;      // per sample, spoke-major
  std::vector<double> k_col;

  int num_samples() const { return num_spokes * samples_per_spoke; }
};

inline constexpr double kGoldenAngleDeg = 111.25;
inline constexpr double kDefaultSigmaFrac = 1.0 / 6.0;

/// Random whole-line mask following a 1D normal profile across phase-encode
/// lines, with a fully sampled block of `center_lines` centermost lines.
/// Exactly round(fraction*cols) lines end up sampled.
CartesianMask gen_varden1d(int rows, int cols, double fraction, int center_lines,
                           double sigma_frac, uint64_t seed);

/// Random point mask following a 2D normal profile with a fully sampled
/// central ellipse covering center_fraction of the grid. Exactly
/// round(fraction*rows*cols) points end up sampled.
CartesianMask gen_varden2d(int rows, int cols, double fraction, double center_fraction,
                           double sigma_frac, uint64_t seed);

/// Every step-th line starting at line 0 plus the `center_lines` centermost
/// lines. Deterministic.
CartesianMask gen_uniform(int rows, int cols, int step, int center_lines = 9);

/// Spoke k gets angle start + k*111.25 (mod 360); samples run along the
/// diameter from -0.5 to 0.5*(1 - 2/samples_per_spoke).
RadialTrajectory gen_golden_radial(int num_spokes, int samples_per_spoke,
                                   double start_angle_deg = 0.0);

/// Total points over sampled points.
double acceleration_factor(const CartesianMask &mask);

/// Fully sampled reference has fs_spokes_multiplier * image_side spokes.
double acceleration_factor(const RadialTrajectory &traj, int image_side,
                           int fs_spokes_multiplier = 2);

} // namespace mrr
