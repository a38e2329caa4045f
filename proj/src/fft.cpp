#include "mrr/fft.hpp"

#include <algorithm>
#include <cmath>

#include "mrr/errors.hpp"

namespace mrr {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, unnormalized, in place.
void fft_pow2(cplx *a, int n, bool inverse) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / len * (inverse ? 1.0 : -1.0);
    cplx wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cplx w(1.0);
      for (int j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// One-dimensional transform plan. Power-of-two sizes run radix-2 directly;
// everything else goes through Bluestein's chirp-z with a padded pow2 FFT.
struct Fft1dPlan {
  int n = 0;
  bool pow2 = false;
  int m = 0;                  // padded size for Bluestein
  std::vector<cplx> chirp;    // exp(-i*pi*k^2/n), forward sign
  std::vector<cplx> bq_fwd;   // FFT of the conjugate-chirp window, forward
  std::vector<cplx> bq_inv;   // same for the inverse transform

  explicit Fft1dPlan(int size) : n(size), pow2(is_pow2(size)) {
    if (pow2) return;
    m = next_pow2(2 * n - 1);
    chirp.resize(n);
    for (int k = 0; k < n; ++k) {
      // k*k mod 2n keeps the angle argument small and exact.
      long long kk = (1LL * k * k) % (2LL * n);
      double ang = M_PI * double(kk) / double(n);
      chirp[k] = cplx(std::cos(ang), -std::sin(ang));
    }
    bq_fwd.assign(m, cplx(0));
    bq_inv.assign(m, cplx(0));
    for (int k = 0; k < n; ++k) {
      bq_fwd[k] = std::conj(chirp[k]);
      if (k > 0) bq_fwd[m - k] = std::conj(chirp[k]);
      bq_inv[k] = chirp[k];
      if (k > 0) bq_inv[m - k] = chirp[k];
    }
    fft_pow2(bq_fwd.data(), m, false);
    fft_pow2(bq_inv.data(), m, false);
  }

  // Unnormalized transform of one line.
  void run(cplx *a, bool inverse, std::vector<cplx> &work) const {
    if (pow2) {
      fft_pow2(a, n, inverse);
      return;
    }
    work.assign(m, cplx(0));
    for (int k = 0; k < n; ++k)
      work[k] = a[k] * (inverse ? std::conj(chirp[k]) : chirp[k]);
    fft_pow2(work.data(), m, false);
    const std::vector<cplx> &bq = inverse ? bq_inv : bq_fwd;
    for (int k = 0; k < m; ++k) work[k] *= bq[k];
    fft_pow2(work.data(), m, true);
    double scale = 1.0 / m;
    for (int k = 0; k < n; ++k)
      a[k] = work[k] * scale * (inverse ? std::conj(chirp[k]) : chirp[k]);
  }
};

void quadrant_swap(ComplexGrid2D &g) {
  int hr = g.rows / 2, hc = g.cols / 2;
  for (int r = 0; r < hr; ++r)
    for (int c = 0; c < g.cols; ++c)
      std::swap(g.at(r, c), g.at(r + hr, (c + hc) % g.cols));
}

void check_finite(const ComplexGrid2D &g, const char *what) {
  for (const cplx &v : g.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidInputError(std::string(what) + ": non-finite input value");
}

ComplexGrid2D centered_fft(const ComplexGrid2D &in, bool inverse) {
  const char *what = inverse ? "ifft2c" : "fft2c";
  if (in.rows % 2 != 0 || in.cols % 2 != 0)
    throw ConfigError(std::string(what) + ": only even dimensions supported");
  check_finite(in, what);

  ComplexGrid2D g = in;
  quadrant_swap(g);

  Fft1dPlan row_plan(g.cols);
  Fft1dPlan col_plan(g.rows);

#pragma omp parallel
  {
    std::vector<cplx> work;
#pragma omp for schedule(static)
    for (int r = 0; r < g.rows; ++r) row_plan.run(&g.data[size_t(r) * g.cols], inverse, work);

    std::vector<cplx> col(g.rows);
#pragma omp for schedule(static)
    for (int c = 0; c < g.cols; ++c) {
      for (int r = 0; r < g.rows; ++r) col[r] = g.at(r, c);
      col_plan.run(col.data(), inverse, work);
      for (int r = 0; r < g.rows; ++r) g.at(r, c) = col[r];
    }
  }

  double scale = 1.0 / std::sqrt(double(g.rows) * double(g.cols));
  for (cplx &v : g.data) v *= scale;
  quadrant_swap(g);
  return g;
}

} // namespace

ComplexGrid2D fft2c(const ComplexGrid2D &img) { return centered_fft(img, false); }

ComplexGrid2D ifft2c(const ComplexGrid2D &ksp) { return centered_fft(ksp, true); }

Image2D magnitude(const ComplexGrid2D &g) {
  Image2D out(g.rows, g.cols);
  for (size_t i = 0; i < g.size(); ++i) out.data[i] = std::abs(g.data[i]);
  return out;
}

Image2D clip01(const Image2D &img) {
  Image2D out = img;
  for (double &v : out.data) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Volume normalize_volume(const Volume &v) {
  double mx = 0.0;
  for (const Image2D &s : v.slices)
    for (double x : s.data) mx = std::max(mx, x);
  if (!(mx > 0.0)) throw InvalidInputError("normalize_volume: volume maximum is not positive");
  Volume out = v;
  for (Image2D &s : out.slices)
    for (double &x : s.data) x = std::max(x, 0.0) / mx;
  return out;
}

ComplexGrid2D to_complex(const Image2D &img) {
  ComplexGrid2D g(img.rows, img.cols);
  for (size_t i = 0; i < img.size(); ++i) g.data[i] = cplx(img.data[i], 0.0);
  return g;
}

} // namespace mrr
