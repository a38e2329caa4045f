#include "mrr/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "mrr/errors.hpp"
#include "mrr/io.hpp"
#include "mrr/kernels.hpp"
#include "mrr/rng.hpp"

namespace mrr {
namespace {

std::string best_path_for(const std::string &ckpt_path) {
  auto dot = ckpt_path.rfind('.');
  if (dot == std::string::npos || ckpt_path.find('/', dot) != std::string::npos)
    return ckpt_path + ".best";
  return ckpt_path.substr(0, dot) + ".best" + ckpt_path.substr(dot);
}

} // namespace

void TrainConfig::validate() const {
  if (!(lr0 > 0.0) || !(lr_decay_factor > 0.0) || lr_decay_every < 1)
    throw ConfigError("TrainConfig: learning-rate settings must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
    throw ConfigError("TrainConfig: Adam constants out of range");
  if (epochs < 0 || batch_size < 1) throw ConfigError("TrainConfig: bad epoch/batch");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ConfigError("TrainConfig: val_fraction must be in [0,1)");
}

AdamState make_adam_state(const ReconResNet &model) {
  AdamState st;
  model.for_each_param([&](const std::string &, const Tensor &t) {
    st.m.emplace_back(t.shape);
    st.v.emplace_back(t.shape);
  });
  return st;
}

void adam_step(ReconResNet &model, const std::vector<Tensor> &grads, AdamState &state,
               double lr, const TrainConfig &cfg) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
  size_t i = 0;
  model.for_each_param([&](const std::string &, Tensor &p) {
    const Tensor &g = grads[i];
    Tensor &m = state.m[i];
    Tensor &v = state.v[i];
    if (g.v.size() != p.v.size())
      throw InvalidInputError("adam_step: gradient shape mismatch");
    for (size_t j = 0; j < p.v.size(); ++j) {
      m.v[j] = cfg.beta1 * m.v[j] + (1.0 - cfg.beta1) * g.v[j];
      v.v[j] = cfg.beta2 * v.v[j] + (1.0 - cfg.beta2) * g.v[j] * g.v[j];
      double mhat = m.v[j] / bc1;
      double vhat = v.v[j] / bc2;
      p.v[j] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
    ++i;
  });
}

double lr_schedule(int epoch, const TrainConfig &cfg) {
  if (epoch < 0) throw ConfigError("lr_schedule: negative epoch");
  return cfg.lr0 / std::pow(cfg.lr_decay_factor, double(epoch / cfg.lr_decay_every));
}

double ssim_loss(const std::vector<Image2D> &pred, const std::vector<Image2D> &target,
                 const SsimParams &p) {
  if (pred.size() != target.size() || pred.empty())
    throw InvalidInputError("ssim_loss: batch sizes differ or empty");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) acc += ssim(pred[i], target[i], p);
  return -acc / double(pred.size());
}

double ssim_loss_with_grad(const Image2D &pred, const Image2D &target, Image2D &grad,
                           const SsimParams &p) {
  require_same_shape(pred, target, "ssim_loss");
  auto win = p.gaussian_window();
  auto st = kernels::ssim_stats(pred, target, win, p.window);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const size_t n_pos = size_t(st.hv) * st.wv;

  // Per window position: S = (A1*A2)/(B1*B2). The gradient with respect to
  // a pixel q inside the window at p collapses to
  //   w(q-p) * (c0(p) + cy(p)*y_q + cx(p)*x_q),
  // so three transposed window correlations produce the full map.
  std::vector<double> c0(n_pos), cy(n_pos), cx(n_pos);
  double ssim_sum = 0.0;
  for (size_t i = 0; i < n_pos; ++i) {
    const double mx = st.mu_x[i], my = st.mu_y[i];
    const double a1 = 2.0 * mx * my + c1;
    const double a2 = 2.0 * st.cov_xy[i] + c2;
    const double b1 = mx * mx + my * my + c1;
    const double b2 = st.var_x[i] + st.var_y[i] + c2;
    const double s = (a1 * a2) / (b1 * b2);
    const double e = 2.0 / (b1 * b2);
    ssim_sum += s;
    c0[i] = e * (my * a2 - a1 * my - s * mx * b2 + s * b1 * mx);
    cy[i] = e * a1;
    cx[i] = -e * s * b1;
  }

  const int H = pred.rows, W = pred.cols;
  std::vector<double> t0(size_t(H) * W), ty(size_t(H) * W), tx(size_t(H) * W);
  kernels::window_correlate_full(c0.data(), st.hv, st.wv, win, p.window, t0.data(), H, W);
  kernels::window_correlate_full(cy.data(), st.hv, st.wv, win, p.window, ty.data(), H, W);
  kernels::window_correlate_full(cx.data(), st.hv, st.wv, win, p.window, tx.data(), H, W);

  grad = Image2D(H, W);
  const double scale = -1.0 / double(n_pos);
  for (size_t q = 0; q < grad.size(); ++q)
    grad.data[q] =
        scale * (t0[q] + ty[q] * target.data[q] + tx[q] * pred.data[q]);
  return -ssim_sum / double(n_pos);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidInputError("median: empty list");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TrainResult train(const ModelConfig &model_cfg, const TrainConfig &train_cfg,
                  const std::vector<TrainSample> &dataset, const std::string &ckpt_path,
                  const std::string &losslog_path, std::ostream *progress,
                  const std::optional<ResumeState> &resume) {
  train_cfg.validate();
  if (dataset.empty()) throw InvalidInputError("train: empty dataset");
  for (const TrainSample &s : dataset) {
    require_same_shape(s.input, s.target, "train");
    require_same_shape(s.input, dataset.front().input, "train");
  }

  ReconResNet model(model_cfg, train_cfg.seed);
  AdamState adam = make_adam_state(model);
  int start_epoch = 0;
  if (resume) {
    size_t i = 0;
    model.for_each_param([&](const std::string &, Tensor &t) {
      if (i >= resume->params.size() || resume->params[i].shape != t.shape)
        throw InvalidInputError("train: resume state does not match the model");
      t.v = resume->params[i++].v;
    });
    if (!resume->adam.m.empty()) adam = resume->adam;
    start_epoch = resume->start_epoch;
  }

  // Validation split by volume group, deterministic in the seed.
  std::set<std::string> group_set;
  for (const TrainSample &s : dataset) group_set.insert(s.group);
  std::vector<std::string> groups(group_set.begin(), group_set.end());
  Rng split_rng(train_cfg.seed ^ 0x9e3779b97f4a7c15ull);
  for (size_t i = groups.size(); i > 1; --i)
    std::swap(groups[i - 1], groups[split_rng.below(i)]);
  size_t n_val_groups = size_t(train_cfg.val_fraction * double(groups.size()));
  std::set<std::string> val_groups(groups.begin(), groups.begin() + n_val_groups);

  std::vector<size_t> train_idx, val_idx;
  for (size_t i = 0; i < dataset.size(); ++i)
    (val_groups.count(dataset[i].group) ? val_idx : train_idx).push_back(i);
  // With no held-out volumes the validation metric falls back to the
  // training slices (evaluated in Eval mode).
  if (val_idx.empty()) val_idx = train_idx;
  if (train_idx.empty()) throw InvalidInputError("train: validation split ate the whole set");

  TrainResult result;
  result.model_cfg = model.config();
  result.final_checkpoint = ckpt_path;

  Rng loop_rng(train_cfg.seed);
  std::vector<Tensor> grads = model.make_grad_tensors();
  ReconResNet::Cache cache;
  std::string best_path = best_path_for(ckpt_path);

  for (int epoch = start_epoch; epoch < start_epoch + train_cfg.epochs; ++epoch) {
    double lr = lr_schedule(epoch, train_cfg);

    std::vector<size_t> order = train_idx;
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[loop_rng.below(i)]);

    std::vector<double> losses;
    losses.reserve(order.size());
    for (size_t idx : order) {
      const TrainSample &s = dataset[idx];
      Image2D out = model.forward(s.input, ForwardMode::Train, &loop_rng, cache);
      Image2D grad_out;
      double loss = ssim_loss_with_grad(out, s.target, grad_out);
      if (!std::isfinite(loss))
        throw InvalidInputError("train: loss became non-finite at epoch " +
                                std::to_string(epoch) + ", sample " + std::to_string(idx));
      for (Tensor &g : grads) std::fill(g.v.begin(), g.v.end(), 0.0);
      model.backward(cache, grad_out, grads);
      adam_step(model, grads, adam, lr, train_cfg);
      losses.push_back(loss);
    }

    std::vector<double> val_ssims;
    val_ssims.reserve(val_idx.size());
    for (size_t idx : val_idx) {
      Image2D out = model.forward(dataset[idx].input, ForwardMode::Eval, nullptr);
      val_ssims.push_back(ssim(out, dataset[idx].target));
    }

    LossLogRow row{epoch, median(losses), median(val_ssims)};
    result.log.push_back(row);
    if (progress)
      (*progress) << "epoch " << row.epoch << " lr " << lr << " train_loss_median "
                  << row.train_loss_median << " val_ssim_median " << row.val_ssim_median
                  << "\n";

    if (row.val_ssim_median > result.best_val_ssim) {
      result.best_val_ssim = row.val_ssim_median;
      result.best_epoch = epoch;
      io::write_checkpoint(best_path, model, epoch, &adam);
      result.best_checkpoint = best_path;
    }
  }

  io::write_checkpoint(ckpt_path, model, start_epoch + train_cfg.epochs, &adam);

  if (!losslog_path.empty()) {
    std::ofstream csv(losslog_path, std::ios::trunc);
    if (!csv) throw FormatError(losslog_path + ": cannot open loss log for writing");
    csv << "epoch,train_loss_median,val_ssim_median\n";
    char buf[96];
    for (const LossLogRow &row : result.log) {
      std::snprintf(buf, sizeof buf, "%d,%.9f,%.9f\n", row.epoch, row.train_loss_median,
                    row.val_ssim_median);
      csv << buf;
    }
  }
  return result;
}

} // namespace mrr
