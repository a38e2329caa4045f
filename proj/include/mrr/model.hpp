#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrr/rng.hpp"
#include "mrr/types.hpp"

namespace mrr {

/// Backbone architecture knobs. The trunk runs at 2*base_features channels;
/// two stride-2 encoder convolutions, num_res_blocks residual blocks with
/// spatial dropout between their convolutions, two nearest-neighbour + conv
/// decoder blocks, and a final wide convolution into a sigmoid.
struct ModelConfig {
  int in_channels = 1;
  int out_channels = 1;
  int base_features = 64;
  int num_res_blocks = 14;
  double dropout_prob = 0.2;
  int res_kernel = 3;
  int updown_kernel = 3;
  int final_kernel = 7;

  std::string canonical() const;
  uint64_t hash() const; // FNV-1a of canonical()
  void validate() const;
};

/// Dense value container for parameters and activations, row-major.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  size_t numel() const { return v.size(); }
  int dim(int i) const { return shape[size_t(i)]; }
};

enum class ForwardMode { Train, Eval };

/// x if x >= 0 else slope_c * x, one learnable slope per channel. x: [C,H,W].
Tensor prelu(const Tensor &x, const Tensor &slope);

/// Train: zero whole channels with probability p, scale survivors by
/// 1/(1-p). Eval: identity.
Tensor spatial_dropout(const Tensor &x, double p, ForwardMode mode, Rng &rng);

class ReconResNet {
public:
  /// Kaiming-style fan-in initialization, PReLU slopes 0.25, deterministic
  /// given seed. Values are rounded to f32 so fresh models survive the
  /// checkpoint round trip bit-exactly.
  ReconResNet(const ModelConfig &cfg, uint64_t seed);

  const ModelConfig &config() const { return cfg_; }
  size_t num_parameters() const;

  /// Fixed traversal order; checkpoints, Adam state and gradient vectors
  /// all follow it.
  void for_each_param(const std::function<void(const std::string &, Tensor &)> &fn);
  void for_each_param(
      const std::function<void(const std::string &, const Tensor &)> &fn) const;
  std::vector<Tensor *> param_ptrs();

  /// Activations recorded by the training-path forward.
  struct Cache {
    Tensor input, z_down1, a_down1, z_down2;
    std::vector<Tensor> block_in;   // num_res_blocks + 1 (last = trunk output)
    std::vector<Tensor> block_t1;   // pre-activation of the first block conv
    std::vector<Tensor> block_t3;   // post-dropout input of the second conv
    std::vector<std::vector<uint8_t>> drop_mask; // per block, per channel
    double drop_scale = 1.0;
    Tensor n_up1, z_up1, n_up2, z_up2, a_up2, output;
  };

  /// Inference path; Eval mode ignores rng and is a pure function of
  /// (params, input). Spatial dims must be divisible by 4.
  Image2D forward(const Image2D &x, ForwardMode mode, Rng *rng) const;

  /// Training path; fills `cache` for a subsequent backward().
  Image2D forward(const Image2D &x, ForwardMode mode, Rng *rng, Cache &cache) const;

  /// Accumulates parameter gradients (ordered like for_each_param) for the
  /// recorded forward pass. grads must be pre-sized like the parameters.
  void backward(const Cache &cache, const Image2D &grad_out,
                std::vector<Tensor> &grads) const;

  /// Zero-filled gradient tensors in traversal order.
  std::vector<Tensor> make_grad_tensors() const;

private:
  struct Conv {
    Tensor w, b;
    int stride = 1;
  };
  struct Block {
    Conv c1, c2;
    Tensor slope;
  };

  Tensor forward_core(const Tensor &x, ForwardMode mode, Rng *rng, Cache *cache) const;

  ModelConfig cfg_;
  Conv down1_, down2_;
  std::vector<Block> blocks_;
  Conv up1_, up2_, final_;
  Tensor s_down1_, s_down2_, s_up1_, s_up2_;
};

} // namespace mrr
