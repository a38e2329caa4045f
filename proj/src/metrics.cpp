#include "mrr/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "mrr/errors.hpp"
#include "mrr/kernels.hpp"

namespace mrr {
namespace {

void check_ssim_inputs(const Image2D &x, const Image2D &y, const SsimParams &p,
                       const char *what) {
  require_same_shape(x, y, what);
  if (x.rows < p.window || x.cols < p.window)
    throw InvalidInputError(std::string(what) + ": image smaller than the window");
  for (double v : x.data)
    if (!(v >= -1e-9 && v <= 1.0 + 1e-9) || !std::isfinite(v))
      throw InvalidInputError(std::string(what) + ": values must lie in [0,1]");
  for (double v : y.data)
    if (!(v >= -1e-9 && v <= 1.0 + 1e-9) || !std::isfinite(v))
      throw InvalidInputError(std::string(what) + ": values must lie in [0,1]");
}

double sample_variance(const std::vector<double> &a, double mean) {
  double acc = 0.0;
  for (double v : a) acc += (v - mean) * (v - mean);
  return acc / double(a.size() - 1);
}

} // namespace

std::vector<double> SsimParams::gaussian_window() const {
  std::vector<double> win(size_t(window) * window);
  double sum = 0.0;
  for (int i = 0; i < window; ++i)
    for (int j = 0; j < window; ++j) {
      double di = i - (window - 1) / 2.0, dj = j - (window - 1) / 2.0;
      win[size_t(i) * window + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      sum += win[size_t(i) * window + j];
    }
  for (double &v : win) v /= sum;
  return win;
}

Image2D ssim_map(const Image2D &x, const Image2D &y, const SsimParams &p) {
  check_ssim_inputs(x, y, p, "ssim");
  auto win = p.gaussian_window();
  auto st = kernels::ssim_stats(x, y, win, p.window);

  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

  Image2D map(st.hv, st.wv);
  for (size_t i = 0; i < map.size(); ++i) {
    double num = (2.0 * st.mu_x[i] * st.mu_y[i] + c1) * (2.0 * st.cov_xy[i] + c2);
    double den = (st.mu_x[i] * st.mu_x[i] + st.mu_y[i] * st.mu_y[i] + c1) *
                 (st.var_x[i] + st.var_y[i] + c2);
    map.data[i] = num / den;
  }
  return map;
}

double ssim(const Image2D &x, const Image2D &y, const SsimParams &p) {
  Image2D map = ssim_map(x, y, p);
  double acc = 0.0;
  for (double v : map.data) acc += v;
  return acc / double(map.size());
}

double mse(const Image2D &x, const Image2D &y) {
  require_same_shape(x, y, "mse");
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = x.data[i] - y.data[i];
    acc += d * d;
  }
  return acc / double(x.size());
}

double nrmse(const Image2D &gt, const Image2D &est) {
  require_same_shape(gt, est, "nrmse");
  double energy = 0.0;
  for (double v : gt.data) energy += v * v;
  if (energy <= 0.0) throw InvalidInputError("nrmse: reference image is all zero");
  return std::sqrt(mse(gt, est)) / std::sqrt(energy / double(gt.size()));
}

double bvd(double nbv_fully, double nbv_other, double nbv_mean_all) {
  if (!(nbv_mean_all > 0.0)) throw InvalidInputError("bvd: mean NBV must be positive");
  return std::abs(nbv_fully - nbv_other) / nbv_mean_all * 100.0;
}

TTestResult welch_ttest(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() < 2 || b.size() < 2)
    throw InvalidInputError("welch_ttest: need at least two samples per group");
  double ma = 0.0, mb = 0.0;
  for (double v : a) ma += v;
  for (double v : b) mb += v;
  ma /= double(a.size());
  mb /= double(b.size());
  double va = sample_variance(a, ma), vb = sample_variance(b, mb);
  if (va <= 0.0 && vb <= 0.0)
    throw InvalidInputError("welch_ttest: both groups have zero variance");

  double na = double(a.size()), nb = double(b.size());
  double se2 = va / na + vb / nb;
  TTestResult res;
  res.t = (ma - mb) / std::sqrt(se2);
  res.df = se2 * se2 /
           ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  boost::math::students_t dist(res.df);
  res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t)));
  return res;
}

MetricsReport evaluate_pair(const Volume &gt, const Volume &est, const SsimParams &p) {
  if (gt.slices.size() != est.slices.size() || gt.slices.empty())
    throw InvalidInputError("evaluate_pair: slice counts differ or volumes empty");

  MetricsReport rep;
  rep.slices.resize(gt.slices.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)gt.slices.size(); ++i) {
    rep.slices[i].ssim = ssim(gt.slices[i], est.slices[i], p);
    rep.slices[i].mse = mse(gt.slices[i], est.slices[i]);
    rep.slices[i].nrmse = nrmse(gt.slices[i], est.slices[i]);
  }

  const double n = double(rep.slices.size());
  for (const SliceMetrics &s : rep.slices) {
    rep.mean.ssim += s.ssim / n;
    rep.mean.mse += s.mse / n;
    rep.mean.nrmse += s.nrmse / n;
  }
  for (const SliceMetrics &s : rep.slices) {
    rep.stddev.ssim += (s.ssim - rep.mean.ssim) * (s.ssim - rep.mean.ssim) / n;
    rep.stddev.mse += (s.mse - rep.mean.mse) * (s.mse - rep.mean.mse) / n;
    rep.stddev.nrmse += (s.nrmse - rep.mean.nrmse) * (s.nrmse - rep.mean.nrmse) / n;
  }
  rep.stddev.ssim = std::sqrt(rep.stddev.ssim);
  rep.stddev.mse = std::sqrt(rep.stddev.mse);
  rep.stddev.nrmse = std::sqrt(rep.stddev.nrmse);
  return rep;
}

} // namespace mrr
