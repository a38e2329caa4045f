#include "mrr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrr/errors.hpp"
#include "mrr/rng.hpp"

namespace mrr {
namespace {

// Weighted sampling without replacement (Efraimidis-Spirakis): draw a key
// log(u)/w per candidate and keep the n largest.
std::vector<int> weighted_sample(const std::vector<int> &candidates,
                                 const std::vector<double> &weights, size_t n, Rng &rng) {
  std::vector<std::pair<double, int>> keys;
  keys.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    keys.emplace_back(std::log(u) / weights[i], candidates[i]);
  }
  std::partial_sort(keys.begin(), keys.begin() + n, keys.end(),
                    [](const auto &a, const auto &b) { return a.first > b.first; });
  std::vector<int> picked(n);
  for (size_t i = 0; i < n; ++i) picked[i] = keys[i].second;
  return picked;
}

// Centermost `count` indices of an axis of length `len`, around len/2.
std::pair<int, int> center_span(int len, int count) {
  int lo = len / 2 - count / 2;
  return {lo, lo + count}; // [lo, hi)
}

long long iround(double x) { return std::llround(x); }

} // namespace

size_t CartesianMask::num_sampled() const {
  return size_t(std::count(keep.begin(), keep.end(), uint8_t(1)));
}

double CartesianMask::sampled_fraction() const {
  return double(num_sampled()) / double(size_t(rows) * cols);
}

CartesianMask gen_varden1d(int rows, int cols, double fraction, int center_lines,
                           double sigma_frac, uint64_t seed) {
  if (rows < 1 || cols < 1) throw ConfigError("gen_varden1d: dims must be positive");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("gen_varden1d: fraction must be in (0,1]");
  long long n_lines = iround(fraction * cols);
  if (center_lines > n_lines)
    throw ConfigError("gen_varden1d: fraction too small to include the center block");

  auto [clo, chi] = center_span(cols, center_lines);
  std::vector<uint8_t> line(cols, 0);
  for (int c = clo; c < chi; ++c) line[c] = 1;

  long long remaining = n_lines - center_lines;
  if (remaining > 0) {
    Rng rng(seed);
    double sigma = sigma_frac * cols;
    double center = cols / 2.0;
    std::vector<int> cand;
    std::vector<double> w;
    for (int c = 0; c < cols; ++c) {
      if (line[c]) continue;
      cand.push_back(c);
      double d = (c - center) / sigma;
      w.push_back(std::exp(-0.5 * d * d) + 1e-300); // keep weights positive
    }
    for (int c : weighted_sample(cand, w, size_t(remaining), rng)) line[c] = 1;
  }

  CartesianMask m;
  m.rows = rows;
  m.cols = cols;
  m.kind = MaskKind::Varden1D;
  m.seed = seed;
  m.requested_fraction = fraction;
  m.keep.assign(size_t(rows) * cols, 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.keep[size_t(r) * cols + c] = line[c];
  return m;
}

CartesianMask gen_varden2d(int rows, int cols, double fraction, double center_fraction,
                           double sigma_frac, uint64_t seed) {
  if (rows < 1 || cols < 1) throw ConfigError("gen_varden2d: dims must be positive");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("gen_varden2d: fraction must be in (0,1]");
  if (!(center_fraction >= 0.0 && center_fraction < fraction))
    throw ConfigError("gen_varden2d: need center_fraction < fraction");

  long long n_points = iround(fraction * double(rows) * double(cols));

  CartesianMask m;
  m.rows = rows;
  m.cols = cols;
  m.kind = MaskKind::Varden2D;
  m.seed = seed;
  m.requested_fraction = fraction;
  m.keep.assign(size_t(rows) * cols, 0);

  // Filled ellipse matching the grid aspect ratio with area
  // center_fraction*rows*cols: semi-axes (rows*t, cols*t), t = sqrt(cf/pi).
  double t = std::sqrt(center_fraction / M_PI);
  double a = rows * t, b = cols * t;
  double cr = rows / 2.0, cc = cols / 2.0;
  long long center_count = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double dr = (r - cr) / a, dc = (c - cc) / b;
      if (dr * dr + dc * dc <= 1.0) {
        m.set(r, c, true);
        ++center_count;
      }
    }
  if (center_count > n_points)
    throw ConfigError("gen_varden2d: fraction too small to include the center region");

  long long remaining = n_points - center_count;
  if (remaining > 0) {
    Rng rng(seed);
    double sr = sigma_frac * rows, sc = sigma_frac * cols;
    std::vector<int> cand;
    std::vector<double> w;
    cand.reserve(size_t(rows) * cols - center_count);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (m.at(r, c)) continue;
        cand.push_back(r * cols + c);
        double dr = (r - cr) / sr, dc = (c - cc) / sc;
        w.push_back(std::exp(-0.5 * (dr * dr + dc * dc)) + 1e-300);
      }
    for (int idx : weighted_sample(cand, w, size_t(remaining), rng)) m.keep[idx] = 1;
  }
  return m;
}

CartesianMask gen_uniform(int rows, int cols, int step, int center_lines) {
  if (rows < 1 || cols < 1) throw ConfigError("gen_uniform: dims must be positive");
  if (step < 1) throw ConfigError("gen_uniform: step must be >= 1");

  std::vector<uint8_t> line(cols, 0);
  for (int c = 0; c < cols; c += step) line[c] = 1;
  auto [clo, chi] = center_span(cols, center_lines);
  for (int c = std::max(clo, 0); c < std::min(chi, cols); ++c) line[c] = 1;

  CartesianMask m;
  m.rows = rows;
  m.cols = cols;
  m.kind = MaskKind::Uniform;
  m.seed = 0;
  m.requested_fraction = 1.0 / step;
  m.keep.assign(size_t(rows) * cols, 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.keep[size_t(r) * cols + c] = line[c];
  return m;
}

RadialTrajectory gen_golden_radial(int num_spokes, int samples_per_spoke,
                                   double start_angle_deg) {
  if (num_spokes < 1) throw ConfigError("gen_golden_radial: need at least one spoke");
  if (samples_per_spoke < 2 || samples_per_spoke % 2 != 0)
    throw ConfigError("gen_golden_radial: samples_per_spoke must be even and >= 2");

  RadialTrajectory t;
  t.num_spokes = num_spokes;
  t.samples_per_spoke = samples_per_spoke;
  t.start_angle_deg = start_angle_deg;
  t.angles_deg.resize(num_spokes);
  t.k_row.resize(size_t(num_spokes) * samples_per_spoke);
  t.k_col.resize(size_t(num_spokes) * samples_per_spoke);

  for (int s = 0; s < num_spokes; ++s) {
    double ang = std::fmod(start_angle_deg + double(s) * kGoldenAngleDeg, 360.0);
    if (ang < 0.0) ang += 360.0;
    t.angles_deg[s] = ang;
    double rad = ang * M_PI / 180.0;
    double cs = std::cos(rad), sn = std::sin(rad);
    for (int i = 0; i < samples_per_spoke; ++i) {
      double p = -0.5 + double(i) / samples_per_spoke;
      double kc = p * cs, kr = p * sn;
      // Axis-aligned spokes can land exactly on +0.5, which is the same
      // frequency as -0.5; keep coordinates in [-0.5, 0.5).
      if (kc >= 0.5) kc -= 1.0;
      if (kr >= 0.5) kr -= 1.0;
      t.k_col[size_t(s) * samples_per_spoke + i] = kc;
      t.k_row[size_t(s) * samples_per_spoke + i] = kr;
    }
  }
  return t;
}

double acceleration_factor(const CartesianMask &mask) {
  size_t sampled = mask.num_sampled();
  if (sampled == 0) throw InvalidInputError("acceleration_factor: empty mask");
  return double(size_t(mask.rows) * mask.cols) / double(sampled);
}

double acceleration_factor(const RadialTrajectory &traj, int image_side,
                           int fs_spokes_multiplier) {
  if (image_side < 1 || fs_spokes_multiplier < 1)
    throw ConfigError("acceleration_factor: bad radial reference");
  return double(fs_spokes_multiplier) * image_side / double(traj.num_spokes);
}

} // namespace mrr
