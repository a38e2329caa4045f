#include "mrr/nufft.hpp"

#include <cmath>

#include "mrr/errors.hpp"
#include "mrr/fft.hpp"

namespace mrr {
namespace {

constexpr int kTableDensity = 1024; // entries per unit offset

double kb_value(double u, double width, double beta) {
  double t = 2.0 * u / width;
  double arg = 1.0 - t * t;
  if (arg <= 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(arg)) / std::cyl_bessel_i(0.0, beta);
}

// Fourier transform of the tabulated kernel at frequency nu (cycles per
// grid sample), via trapezoid integration over the table nodes. The kernel
// is even, so this is a plain cosine integral.
double kernel_transform(const kernels::KbTable &tab, double nu) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < tab.values.size(); ++i) {
    double u0 = double(i) * tab.step, u1 = double(i + 1) * tab.step;
    double f0 = tab.values[i] * std::cos(2.0 * M_PI * nu * u0);
    double f1 = tab.values[i + 1] * std::cos(2.0 * M_PI * nu * u1);
    acc += 0.5 * (f0 + f1) * (u1 - u0);
  }
  return 2.0 * acc; // both halves of the even kernel
}

} // namespace

NufftPlan plan_nufft(int image_side, const RadialTrajectory &traj, double oversample,
                     int kernel_width) {
  if (image_side < 8 || image_side % 2 != 0)
    throw ConfigError("plan_nufft: image_side must be even and >= 8");
  if (oversample < 1.25) throw ConfigError("plan_nufft: oversample must be >= 1.25");
  if (kernel_width < 4) throw ConfigError("plan_nufft: kernel_width must be >= 4");

  NufftPlan plan;
  plan.image_side = image_side;
  plan.oversample = oversample;
  plan.kernel_width = kernel_width;
  plan.traj = traj;

  int grid = int(std::ceil(oversample * image_side));
  if (grid % 2 != 0) ++grid;
  plan.grid_side = grid;

  // Beatty et al. choice of the Kaiser-Bessel shape parameter for the
  // actual grid ratio.
  double sigma = double(grid) / image_side;
  double a = (kernel_width / sigma) * (sigma - 0.5);
  double beta = M_PI * std::sqrt(a * a - 0.8);

  plan.table.width = kernel_width;
  plan.table.step = 1.0 / kTableDensity;
  size_t n_entries = size_t(kernel_width / 2.0 * kTableDensity) + 2;
  plan.table.values.resize(n_entries);
  for (size_t i = 0; i < n_entries; ++i)
    plan.table.values[i] = kb_value(double(i) * plan.table.step, kernel_width, beta);
  plan.table.values.back() = 0.0;

  // Deapodization in multiply form, with the transform scaling folded in:
  // forward needs grid/(N * c(nu_r) * c(nu_c)).
  std::vector<double> d1(image_side);
  for (int m = 0; m < image_side; ++m)
    d1[m] = kernel_transform(plan.table, double(m - image_side / 2) / grid);
  plan.deapod.resize(size_t(image_side) * image_side);
  for (int r = 0; r < image_side; ++r)
    for (int c = 0; c < image_side; ++c) {
      double denom = double(image_side) * d1[r] * d1[c];
      if (!(denom > 0.0) || !std::isfinite(denom))
        throw InvalidInputError("plan_nufft: deapodization is not strictly positive");
      plan.deapod[size_t(r) * image_side + c] = double(grid) / denom;
    }

  int m = traj.num_samples();
  plan.pos_row.resize(m);
  plan.pos_col.resize(m);
  for (int j = 0; j < m; ++j) {
    double kr = traj.k_row[j], kc = traj.k_col[j];
    if (kr < -0.5 || kr >= 0.5 || kc < -0.5 || kc >= 0.5)
      throw ConfigError("plan_nufft: trajectory coordinate outside [-0.5, 0.5)");
    plan.pos_row[j] = kr * grid + grid / 2.0;
    plan.pos_col[j] = kc * grid + grid / 2.0;
  }
  return plan;
}

SampleVector nufft_forward(const NufftPlan &plan, const ComplexGrid2D &img) {
  const int n = plan.image_side, g = plan.grid_side;
  if (img.rows != n || img.cols != n)
    throw InvalidInputError("nufft_forward: image does not match plan side");

  ComplexGrid2D fine(g, g);
  int off = (g - n) / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      fine.at(r + off, c + off) = img.at(r, c) * plan.deapod[size_t(r) * n + c];

  ComplexGrid2D spec = fft2c(fine);

  SampleVector out;
  out.num_spokes = plan.traj.num_spokes;
  out.samples_per_spoke = plan.traj.samples_per_spoke;
  out.values.resize(plan.traj.num_samples());
  kernels::kb_gather(spec.data.data(), g, plan.pos_row.data(), plan.pos_col.data(),
                     out.size(), plan.table, out.values.data());
  return out;
}

ComplexGrid2D nufft_adjoint(const NufftPlan &plan, const SampleVector &samples) {
  const int n = plan.image_side, g = plan.grid_side;
  if (samples.size() != plan.traj.num_samples())
    throw InvalidInputError("nufft_adjoint: sample count does not match plan");

  ComplexGrid2D fine(g, g);
  kernels::kb_scatter(samples.values.data(), samples.size(), plan.pos_row.data(),
                      plan.pos_col.data(), plan.table, fine.data.data(), g);

  ComplexGrid2D img_fine = ifft2c(fine);

  ComplexGrid2D out(n, n);
  int off = (g - n) / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out.at(r, c) = img_fine.at(r + off, c + off) * plan.deapod[size_t(r) * n + c];
  return out;
}

namespace {

// Dirichlet-type sum over centered pixel coordinates,
// sum_{d=-n/2}^{n/2-1} exp(-2i*pi*k*d).
cplx dirichlet_centered(double k, int n) {
  cplx q = std::exp(cplx(0.0, -2.0 * M_PI * k));
  if (std::abs(q - cplx(1.0, 0.0)) < 1e-12) return cplx(double(n), 0.0);
  cplx first = std::exp(cplx(0.0, M_PI * k * n)); // d = -n/2 term
  return first * (cplx(1.0, 0.0) - std::pow(q, n)) / (cplx(1.0, 0.0) - q);
}

} // namespace

std::vector<double> dcf_radial(const RadialTrajectory &traj) {
  const int s = traj.samples_per_spoke;
  const int nsp = traj.num_spokes;
  std::vector<double> w(size_t(nsp) * s);
  for (int sp = 0; sp < nsp; ++sp)
    for (int i = 0; i < s; ++i) {
      double radius = (i == s / 2) ? 1.0 / (2.0 * s) : std::abs(-0.5 + double(i) / s);
      w[size_t(sp) * s + i] = radius;
    }
  // Normalize so adjoint(dcf * forward(const)) equals 1 at the grid center:
  // for a constant image the transform pair reduces to
  // (1/N^2) * sum_j w_j * D(k_row) * D(k_col), with N = s/2 (the standard
  // 2x readout oversampling ties the spoke length to the image side).
  const int n = s / 2;
  double dc_gain = 0.0;
  for (int j = 0; j < nsp * s; ++j) {
    cplx d = dirichlet_centered(traj.k_row[j], n) * dirichlet_centered(traj.k_col[j], n);
    dc_gain += w[j] * d.real();
  }
  dc_gain /= double(n) * double(n);
  if (!(dc_gain > 0.0))
    throw InvalidInputError("dcf_radial: degenerate trajectory, zero DC response");
  for (double &v : w) v /= dc_gain;
  return w;
}

SampleVector apply_dcf(const SampleVector &s, const std::vector<double> &w) {
  if (w.size() != s.values.size())
    throw InvalidInputError("apply_dcf: weight length does not match samples");
  SampleVector out = s;
  for (size_t i = 0; i < w.size(); ++i) out.values[i] *= w[i];
  return out;
}

} // namespace mrr
