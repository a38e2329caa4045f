#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrr/model.hpp"
#include "mrr/nufft.hpp"
#include "mrr/sampling.hpp"
#include "mrr/train.hpp"
#include "mrr/types.hpp"

// Bit-exact little-endian container formats. Common header layout:
//   magic[4]  version u16  dtype u8 {1=u8, 2=f32, 3=complex-f32}
//   ndims u8  dims u32[ndims]  payload
// Payload length is always product(dims) * dtype size (x2 for complex).
// MSK1 carries a 16-byte pattern block (kind u8, pad[3], seed u64, fraction
// f32) between header and payload. TRJ1 stores the golden-angle generator
// parameters (spokes, samples/spoke, start angle) instead of coordinates so
// the exact-degree angles survive the round trip. CKPT declares its payload
// as a u8 blob and nests config text plus named f32 tensors inside.
namespace mrr::io {

inline constexpr uint16_t kFormatVersion = 1;

void write_image(const std::string &path, const Image2D &img);
Image2D read_image(const std::string &path);

void write_volume(const std::string &path, const Volume &vol);
Volume read_volume(const std::string &path); // accepts 2-dim IMG1 as one slice

void write_kspace(const std::string &path, const ComplexGrid2D &grid);
ComplexGrid2D read_kspace(const std::string &path);

void write_mask(const std::string &path, const CartesianMask &mask);
CartesianMask read_mask(const std::string &path);

void write_trajectory(const std::string &path, const RadialTrajectory &traj);
RadialTrajectory read_trajectory(const std::string &path);

void write_samples(const std::string &path, const SampleVector &sv);
SampleVector read_samples(const std::string &path);

/// First four bytes of a file as a string, for format dispatch.
std::string peek_magic(const std::string &path);

struct Checkpoint {
  ModelConfig model_cfg;
  int epoch = 0;
  std::vector<std::pair<std::string, Tensor>> params; // traversal order
  bool has_adam = false;
  AdamState adam;
};

void write_checkpoint(const std::string &path, const ReconResNet &model, int epoch,
                      const AdamState *adam = nullptr);
Checkpoint read_checkpoint(const std::string &path);

/// Rebuild a model from a checkpoint; throws on config-hash mismatch
/// against the stored hash or tensor-shape disagreements.
ReconResNet model_from_checkpoint(const Checkpoint &ckpt);

// --- NIfTI-1 (single file, optionally gzip; minimal feature set) ---
struct NiftiVolumeMeta {
  int dims[3] = {0, 0, 0};
  int16_t datatype = 0;
  double pixdim[3] = {1.0, 1.0, 1.0};
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
};

struct NiftiVolume {
  NiftiVolumeMeta meta;
  std::vector<double> data; // x-fastest, scl_slope/inter applied
};

NiftiVolume read_nifti_minimal(const std::string &path);

/// Cut a raw NIfTI array into 2D slices along the given axis (0=x, 1=y,
/// 2=z). Not normalized; feed the result to normalize_volume.
Volume nifti_slices(const NiftiVolume &nv, int axis);

// --- manifest: tab-separated gt/input/measured/pattern paths ---
struct ManifestRow {
  std::string gt;
  std::string input;
  std::string measured;
  std::string pattern; // MSK1 or TRJ1 file path
};

void write_manifest(const std::string &path, const std::vector<ManifestRow> &rows);
std::vector<ManifestRow> read_manifest(const std::string &path);

/// Directory of a path, for resolving manifest-relative references.
std::string parent_dir(const std::string &path);
std::string join_path(const std::string &dir, const std::string &rel);

/// Load (input, target) pairs from a manifest; group = gt filename with a
/// trailing "_s<digits>..." slice suffix stripped, so slices of one volume
/// share a group.
std::vector<TrainSample> load_training_set(const std::string &manifest_path);

// --- metrics report CSV: slice,ssim,mse,nrmse plus mean/std rows ---
void write_metrics_csv(const std::string &path, const MetricsReport &report);

/// Per-slice ssim column of a report written by write_metrics_csv.
std::vector<double> read_metrics_csv_ssim(const std::string &path);

/// Two-column text: subject_id,nbv_mm3.
std::vector<std::pair<std::string, double>> read_nbv_table(const std::string &path);

} // namespace mrr::io
