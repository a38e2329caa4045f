#pragma once

#include <optional>
#include <vector>

#include "mrr/types.hpp"

namespace mrr {

/// Window and constants for the structural-similarity computation. The map
/// uses Gaussian-weighted local statistics over valid window positions only.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double dynamic_range = 1.0; // L
  double k1 = 0.01;
  double k2 = 0.03;

  std::vector<double> gaussian_window() const; // normalized to sum 1
};

/// Mean of the local similarity map. Symmetric in (x, y).
double ssim(const Image2D &x, const Image2D &y, const SsimParams &p = {});

/// The local similarity map itself, shape (H-window+1, W-window+1).
Image2D ssim_map(const Image2D &x, const Image2D &y, const SsimParams &p = {});

double mse(const Image2D &x, const Image2D &y);

/// sqrt(mse) normalized by the root-mean-square of the reference.
double nrmse(const Image2D &gt, const Image2D &est);

/// Percentage brain-volume difference from externally measured normalized
/// brain volumes (mm^3).
double bvd(double nbv_fully, double nbv_other, double nbv_mean_all);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

/// Welch's two-sample t-test with Welch-Satterthwaite degrees of freedom;
/// two-sided p-value.
TTestResult welch_ttest(const std::vector<double> &a, const std::vector<double> &b);

struct SliceMetrics {
  double ssim = 0.0;
  double mse = 0.0;
  double nrmse = 0.0;
};

struct MetricsReport {
  std::vector<SliceMetrics> slices;
  SliceMetrics mean;
  SliceMetrics stddev; // population denominator n
  std::optional<double> bvd_percent;
};

/// Per-slice metrics plus mean/std aggregates over the volume.
MetricsReport evaluate_pair(const Volume &gt, const Volume &est, const SsimParams &p = {});

} // namespace mrr
