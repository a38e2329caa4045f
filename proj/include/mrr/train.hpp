#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mrr/metrics.hpp"
#include "mrr/model.hpp"
#include "mrr/types.hpp"

namespace mrr {

struct TrainConfig {
  double lr0 = 1e-4;
  double lr_decay_factor = 10.0;
  int lr_decay_every = 50; // epochs
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-9;
  int epochs = 0;
  int batch_size = 1;
  uint64_t seed = 0;
  double val_fraction = 0.2;

  void validate() const;
};

struct AdamState {
  std::vector<Tensor> m, v;
  uint64_t t = 0;
};

AdamState make_adam_state(const ReconResNet &model);

/// Bias-corrected Adam update over all model parameters; grads follow the
/// model's traversal order. Increments state.t.
void adam_step(ReconResNet &model, const std::vector<Tensor> &grads, AdamState &state,
               double lr, const TrainConfig &cfg);

/// lr0 / factor^floor(epoch / every): piecewise constant, non-increasing.
double lr_schedule(int epoch, const TrainConfig &cfg);

/// Negative mean structural similarity over the batch, L = 1.
double ssim_loss(const std::vector<Image2D> &pred, const std::vector<Image2D> &target,
                 const SsimParams &p = {});

/// Single-image loss plus its gradient with respect to pred.
double ssim_loss_with_grad(const Image2D &pred, const Image2D &target, Image2D &grad,
                           const SsimParams &p = {});

/// One training example. `group` ties slices of the same volume together so
/// the validation split never cuts through a volume.
struct TrainSample {
  Image2D input;
  Image2D target;
  std::string group;
};

struct LossLogRow {
  int epoch = 0;
  double train_loss_median = 0.0;
  double val_ssim_median = 0.0;
};

struct ResumeState {
  std::vector<Tensor> params; // traversal order
  AdamState adam;
  int start_epoch = 0;
};

struct TrainResult {
  ModelConfig model_cfg;
  std::vector<LossLogRow> log;
  double best_val_ssim = -2.0;
  int best_epoch = -1;
  std::string final_checkpoint;
  std::string best_checkpoint; // empty when no epoch ran
};

/// Runs the epoch loop (backbone only, no data consistency), writes CKPT1
/// files at the best median validation SSIM and at the end, and the loss
/// log as CSV `epoch,train_loss_median,val_ssim_median` when a path is
/// given. Aborts with a diagnostic on NaN loss.
TrainResult train(const ModelConfig &model_cfg, const TrainConfig &train_cfg,
                  const std::vector<TrainSample> &dataset, const std::string &ckpt_path,
                  const std::string &losslog_path = {}, std::ostream *progress = nullptr,
                  const std::optional<ResumeState> &resume = std::nullopt);

/// Median of a list (average of the middle two for even sizes).
double median(std::vector<double> values);

} // namespace mrr
