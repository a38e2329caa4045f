#include "mrr/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mrr/errors.hpp"
#include "mrr/kernels.hpp"

namespace mrr {
namespace {

size_t shape_numel(const std::vector<int> &s) {
  size_t n = 1;
  for (int d : s) n *= size_t(d);
  return n;
}

uint64_t fnv1a(const std::string &s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Tensor conv_forward(const Tensor &x, const Tensor &w, const Tensor &b, int stride) {
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int O = w.dim(0), k = w.dim(2);
  Tensor out({O, kernels::conv_out_dim(H, k, stride), kernels::conv_out_dim(W, k, stride)});
  kernels::conv2d_forward(x.v.data(), C, H, W, w.v.data(), b.v.data(), O, k, stride,
                          out.v.data());
  return out;
}

Tensor nearest2x(const Tensor &x) {
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  Tensor out({C, 2 * H, 2 * W});
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < 2 * H; ++i) {
      const double *src = &x.v[(size_t(c) * H + i / 2) * W];
      double *dst = &out.v[(size_t(c) * 2 * H + i) * 2 * W];
      for (int j = 0; j < 2 * W; ++j) dst[j] = src[j / 2];
    }
  return out;
}

Tensor nearest2x_adjoint(const Tensor &g) {
  const int C = g.dim(0), H2 = g.dim(1), W2 = g.dim(2);
  Tensor out({C, H2 / 2, W2 / 2});
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < H2; ++i) {
      const double *src = &g.v[(size_t(c) * H2 + i) * W2];
      double *dst = &out.v[(size_t(c) * (H2 / 2) + i / 2) * (W2 / 2)];
      for (int j = 0; j < W2; ++j) dst[j / 2] += src[j];
    }
  return out;
}

// g_in from (pre-activation z, upstream g); accumulates slope gradient.
Tensor prelu_backward(const Tensor &z, const Tensor &g, const Tensor &slope,
                      Tensor *g_slope) {
  const int C = z.dim(0);
  const size_t hw = size_t(z.dim(1)) * z.dim(2);
  Tensor out(z.shape);
  for (int c = 0; c < C; ++c) {
    const double s = slope.v[c];
    double acc = 0.0;
    const double *zp = &z.v[c * hw];
    const double *gp = &g.v[c * hw];
    double *op = &out.v[c * hw];
    for (size_t i = 0; i < hw; ++i) {
      if (zp[i] >= 0.0) {
        op[i] = gp[i];
      } else {
        op[i] = gp[i] * s;
        acc += gp[i] * zp[i];
      }
    }
    if (g_slope) g_slope->v[c] += acc;
  }
  return out;
}

Tensor image_to_tensor(const Image2D &img) {
  Tensor t({1, img.rows, img.cols});
  t.v = img.data;
  return t;
}

Image2D tensor_to_image(const Tensor &t) {
  Image2D img(t.dim(1), t.dim(2));
  img.data = t.v;
  return img;
}

} // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), v(shape_numel(shape), 0.0) {}

std::string ModelConfig::canonical() const {
  std::ostringstream os;
  os.precision(17); // exact double round trip through the checkpoint text
  os << "in=" << in_channels << ";out=" << out_channels << ";feat=" << base_features
     << ";blocks=" << num_res_blocks << ";drop=" << dropout_prob
     << ";rk=" << res_kernel << ";uk=" << updown_kernel << ";fk=" << final_kernel;
  return os.str();
}

uint64_t ModelConfig::hash() const { return fnv1a(canonical()); }

void ModelConfig::validate() const {
  if (base_features < 1 || num_res_blocks < 1)
    throw ConfigError("ModelConfig: base_features and num_res_blocks must be >= 1");
  if (!(dropout_prob >= 0.0 && dropout_prob < 1.0))
    throw ConfigError("ModelConfig: dropout_prob must be in [0,1)");
  if (res_kernel % 2 == 0 || updown_kernel % 2 == 0 || final_kernel % 2 == 0)
    throw ConfigError("ModelConfig: kernels must be odd");
}

Tensor prelu(const Tensor &x, const Tensor &slope) {
  const int C = x.dim(0);
  const size_t hw = size_t(x.dim(1)) * x.dim(2);
  Tensor out(x.shape);
  for (int c = 0; c < C; ++c) {
    const double s = slope.v[c];
    const double *xp = &x.v[c * hw];
    double *op = &out.v[c * hw];
    for (size_t i = 0; i < hw; ++i) op[i] = xp[i] >= 0.0 ? xp[i] : s * xp[i];
  }
  return out;
}

Tensor spatial_dropout(const Tensor &x, double p, ForwardMode mode, Rng &rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("spatial_dropout: p must be in [0,1)");
  if (mode == ForwardMode::Eval || p == 0.0) return x;
  const int C = x.dim(0);
  const size_t hw = size_t(x.dim(1)) * x.dim(2);
  Tensor out(x.shape);
  const double scale = 1.0 / (1.0 - p);
  for (int c = 0; c < C; ++c) {
    bool keep = rng.uniform() >= p;
    const double *xp = &x.v[c * hw];
    double *op = &out.v[c * hw];
    for (size_t i = 0; i < hw; ++i) op[i] = keep ? xp[i] * scale : 0.0;
  }
  return out;
}

ReconResNet::ReconResNet(const ModelConfig &cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  const int f = cfg_.base_features, f2 = 2 * cfg_.base_features;
  const int rk = cfg_.res_kernel, uk = cfg_.updown_kernel, fk = cfg_.final_kernel;

  down1_ = {Tensor({f, cfg_.in_channels, uk, uk}), Tensor({f}), 2};
  s_down1_ = Tensor({f});
  down2_ = {Tensor({f2, f, uk, uk}), Tensor({f2}), 2};
  s_down2_ = Tensor({f2});
  blocks_.resize(cfg_.num_res_blocks);
  for (Block &b : blocks_) {
    b.c1 = {Tensor({f2, f2, rk, rk}), Tensor({f2}), 1};
    b.slope = Tensor({f2});
    b.c2 = {Tensor({f2, f2, rk, rk}), Tensor({f2}), 1};
  }
  up1_ = {Tensor({f, f2, uk, uk}), Tensor({f}), 1};
  s_up1_ = Tensor({f});
  up2_ = {Tensor({f, f, uk, uk}), Tensor({f}), 1};
  s_up2_ = Tensor({f});
  final_ = {Tensor({cfg_.out_channels, f, fk, fk}), Tensor({cfg_.out_channels}), 1};

  Rng rng(seed);
  for_each_param([&](const std::string &name, Tensor &t) {
    bool is_weight = name.ends_with(".weight");
    bool is_slope = name.ends_with(".prelu");
    if (is_weight) {
      // Fan-in scaled normal; fan_in = C*k*k. Without normalization layers
      // the residual branches must be damped or the trunk variance grows
      // exponentially with depth and saturates the sigmoid; the final conv
      // feeds the sigmoid directly and gets gain 1.
      double fan_in = double(t.dim(1)) * t.dim(2) * t.dim(3);
      double gain = 2.0;
      if (name == "final.weight") gain = 1.0;
      double std_dev = std::sqrt(gain / fan_in);
      if (name.starts_with("res") && name.ends_with(".conv2.weight"))
        std_dev /= std::sqrt(2.0 * cfg_.num_res_blocks);
      for (double &v : t.v) v = double(float(rng.gaussian() * std_dev));
    } else if (is_slope) {
      for (double &v : t.v) v = 0.25;
    } // biases stay zero
  });
}

void ReconResNet::for_each_param(
    const std::function<void(const std::string &, Tensor &)> &fn) {
  fn("down1.weight", down1_.w);
  fn("down1.bias", down1_.b);
  fn("down1.prelu", s_down1_);
  fn("down2.weight", down2_.w);
  fn("down2.bias", down2_.b);
  fn("down2.prelu", s_down2_);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    std::string p = "res" + std::to_string(i);
    fn(p + ".conv1.weight", blocks_[i].c1.w);
    fn(p + ".conv1.bias", blocks_[i].c1.b);
    fn(p + ".prelu", blocks_[i].slope);
    fn(p + ".conv2.weight", blocks_[i].c2.w);
    fn(p + ".conv2.bias", blocks_[i].c2.b);
  }
  fn("up1.weight", up1_.w);
  fn("up1.bias", up1_.b);
  fn("up1.prelu", s_up1_);
  fn("up2.weight", up2_.w);
  fn("up2.bias", up2_.b);
  fn("up2.prelu", s_up2_);
  fn("final.weight", final_.w);
  fn("final.bias", final_.b);
}

void ReconResNet::for_each_param(
    const std::function<void(const std::string &, const Tensor &)> &fn) const {
  const_cast<ReconResNet *>(this)->for_each_param(
      [&](const std::string &n, Tensor &t) { fn(n, t); });
}

std::vector<Tensor *> ReconResNet::param_ptrs() {
  std::vector<Tensor *> out;
  for_each_param([&](const std::string &, Tensor &t) { out.push_back(&t); });
  return out;
}

size_t ReconResNet::num_parameters() const {
  size_t n = 0;
  for_each_param([&](const std::string &, const Tensor &t) { n += t.numel(); });
  return n;
}

std::vector<Tensor> ReconResNet::make_grad_tensors() const {
  std::vector<Tensor> grads;
  for_each_param(
      [&](const std::string &, const Tensor &t) { grads.emplace_back(t.shape); });
  return grads;
}

Tensor ReconResNet::forward_core(const Tensor &x, ForwardMode mode, Rng *rng,
                                 Cache *cache) const {
  if (x.dim(1) % 4 != 0 || x.dim(2) % 4 != 0)
    throw InvalidInputError("forward: spatial dims must be divisible by 4");
  if (mode == ForwardMode::Train && cfg_.dropout_prob > 0.0 && rng == nullptr)
    throw InvalidInputError("forward: Train mode with dropout needs an rng");

  if (cache) {
    cache->block_in.clear();
    cache->block_t1.clear();
    cache->block_t3.clear();
    cache->drop_mask.clear();
    cache->input = x;
  }

  Tensor z1 = conv_forward(x, down1_.w, down1_.b, down1_.stride);
  Tensor a1 = prelu(z1, s_down1_);
  Tensor z2 = conv_forward(a1, down2_.w, down2_.b, down2_.stride);
  Tensor y = prelu(z2, s_down2_);
  if (cache) {
    cache->z_down1 = z1;
    cache->a_down1 = a1;
    cache->z_down2 = z2;
  }

  const bool drop_on = mode == ForwardMode::Train && cfg_.dropout_prob > 0.0;
  const double scale = drop_on ? 1.0 / (1.0 - cfg_.dropout_prob) : 1.0;
  if (cache) cache->drop_scale = scale;
  const int f2 = 2 * cfg_.base_features;

  for (const Block &b : blocks_) {
    if (cache) cache->block_in.push_back(y);
    Tensor t1 = conv_forward(y, b.c1.w, b.c1.b, 1);
    Tensor t2 = prelu(t1, b.slope);
    if (cache) cache->block_t1.push_back(std::move(t1));

    Tensor t3;
    std::vector<uint8_t> mask;
    if (drop_on) {
      mask.resize(f2);
      for (int c = 0; c < f2; ++c) mask[c] = rng->uniform() >= cfg_.dropout_prob ? 1 : 0;
      t3 = Tensor(t2.shape);
      const size_t hw = size_t(t2.dim(1)) * t2.dim(2);
      for (int c = 0; c < f2; ++c) {
        const double m = mask[c] ? scale : 0.0;
        for (size_t i = 0; i < hw; ++i) t3.v[c * hw + i] = t2.v[c * hw + i] * m;
      }
    } else {
      t3 = std::move(t2);
    }

    Tensor t4 = conv_forward(t3, b.c2.w, b.c2.b, 1);
    if (cache) {
      cache->block_t3.push_back(std::move(t3));
      cache->drop_mask.push_back(std::move(mask));
    }
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += t4.v[i];
  }
  if (cache) cache->block_in.push_back(y); // trunk output

  Tensor n1 = nearest2x(y);
  Tensor z3 = conv_forward(n1, up1_.w, up1_.b, 1);
  Tensor a3 = prelu(z3, s_up1_);
  Tensor n2 = nearest2x(a3);
  Tensor z4 = conv_forward(n2, up2_.w, up2_.b, 1);
  Tensor a4 = prelu(z4, s_up2_);
  Tensor z5 = conv_forward(a4, final_.w, final_.b, 1);
  for (double &v : z5.v) v = 1.0 / (1.0 + std::exp(-v));

  if (cache) {
    cache->n_up1 = std::move(n1);
    cache->z_up1 = std::move(z3);
    cache->n_up2 = std::move(n2);
    cache->z_up2 = std::move(z4);
    cache->a_up2 = std::move(a4);
    cache->output = z5;
  }
  return z5;
}

Image2D ReconResNet::forward(const Image2D &x, ForwardMode mode, Rng *rng) const {
  if (cfg_.in_channels != 1 || cfg_.out_channels != 1)
    throw ConfigError("forward: image entry point expects single-channel config");
  return tensor_to_image(forward_core(image_to_tensor(x), mode, rng, nullptr));
}

Image2D ReconResNet::forward(const Image2D &x, ForwardMode mode, Rng *rng,
                             Cache &cache) const {
  if (cfg_.in_channels != 1 || cfg_.out_channels != 1)
    throw ConfigError("forward: image entry point expects single-channel config");
  return tensor_to_image(forward_core(image_to_tensor(x), mode, rng, &cache));
}

void ReconResNet::backward(const Cache &cache, const Image2D &grad_out,
                           std::vector<Tensor> &grads) const {
  // Gradient slots in traversal order.
  size_t gi = 0;
  auto next = [&]() -> Tensor & { return grads[gi++]; };
  Tensor &g_d1w = next(), &g_d1b = next(), &g_d1s = next();
  Tensor &g_d2w = next(), &g_d2b = next(), &g_d2s = next();
  struct BlockGrads {
    Tensor *c1w, *c1b, *slope, *c2w, *c2b;
  };
  std::vector<BlockGrads> bg(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i)
    bg[i] = {&next(), &next(), &next(), &next(), &next()};
  Tensor &g_u1w = next(), &g_u1b = next(), &g_u1s = next();
  Tensor &g_u2w = next(), &g_u2b = next(), &g_u2s = next();
  Tensor &g_fw = next(), &g_fb = next();

  auto conv_bwd = [](const Tensor &gout, const Tensor &x, const Tensor &w, int stride,
                     Tensor &gw, Tensor &gb, bool want_input) -> Tensor {
    Tensor gw_local(w.shape), gb_local({w.dim(0)});
    kernels::conv2d_grad_params(gout.v.data(), w.dim(0), x.v.data(), x.dim(0), x.dim(1),
                                x.dim(2), w.dim(2), stride, gw_local.v.data(),
                                gb_local.v.data());
    for (size_t i = 0; i < gw.v.size(); ++i) gw.v[i] += gw_local.v[i];
    for (size_t i = 0; i < gb.v.size(); ++i) gb.v[i] += gb_local.v[i];
    Tensor gx;
    if (want_input) {
      gx = Tensor(x.shape);
      kernels::conv2d_grad_input(gout.v.data(), w.dim(0), w.v.data(), x.dim(0), x.dim(1),
                                 x.dim(2), w.dim(2), stride, gx.v.data());
    }
    return gx;
  };

  // Sigmoid.
  Tensor g = Tensor(cache.output.shape);
  for (size_t i = 0; i < g.v.size(); ++i) {
    double s = cache.output.v[i];
    g.v[i] = grad_out.data[i] * s * (1.0 - s);
  }

  g = conv_bwd(g, cache.a_up2, final_.w, 1, g_fw, g_fb, true);
  g = prelu_backward(cache.z_up2, g, s_up2_, &g_u2s);
  g = conv_bwd(g, cache.n_up2, up2_.w, 1, g_u2w, g_u2b, true);
  g = nearest2x_adjoint(g);
  g = prelu_backward(cache.z_up1, g, s_up1_, &g_u1s);
  g = conv_bwd(g, cache.n_up1, up1_.w, 1, g_u1w, g_u1b, true);
  g = nearest2x_adjoint(g);

  for (int i = int(blocks_.size()) - 1; i >= 0; --i) {
    const Block &b = blocks_[size_t(i)];
    // y_out = y_in + conv2(drop(prelu(conv1(y_in)))): g flows both ways.
    Tensor g_t3 = conv_bwd(g, cache.block_t3[size_t(i)], b.c2.w, 1, *bg[size_t(i)].c2w,
                           *bg[size_t(i)].c2b, true);
    if (!cache.drop_mask[size_t(i)].empty()) {
      const size_t hw = size_t(g_t3.dim(1)) * g_t3.dim(2);
      for (int c = 0; c < g_t3.dim(0); ++c) {
        const double m = cache.drop_mask[size_t(i)][size_t(c)] ? cache.drop_scale : 0.0;
        for (size_t j = 0; j < hw; ++j) g_t3.v[c * hw + j] *= m;
      }
    }
    Tensor g_t1 =
        prelu_backward(cache.block_t1[size_t(i)], g_t3, b.slope, bg[size_t(i)].slope);
    Tensor g_in = conv_bwd(g_t1, cache.block_in[size_t(i)], b.c1.w, 1,
                           *bg[size_t(i)].c1w, *bg[size_t(i)].c1b, true);
    for (size_t j = 0; j < g.v.size(); ++j) g.v[j] += g_in.v[j];
  }

  g = prelu_backward(cache.z_down2, g, s_down2_, &g_d2s);
  g = conv_bwd(g, cache.a_down1, down2_.w, down2_.stride, g_d2w, g_d2b, true);
  g = prelu_backward(cache.z_down1, g, s_down1_, &g_d1s);
  conv_bwd(g, cache.input, down1_.w, down1_.stride, g_d1w, g_d1b, false);
}

} // namespace mrr
