#include "mrr/io.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "mrr/errors.hpp"

namespace mrr::io {
namespace {

namespace fs = std::filesystem;

enum Dtype : uint8_t { DT_U8 = 1, DT_F32 = 2, DT_CF32 = 3 };

size_t dtype_size(uint8_t dt) {
  switch (dt) {
    case DT_U8: return 1;
    case DT_F32: return 4;
    case DT_CF32: return 8;
    default: throw FormatError("unknown dtype code " + std::to_string(dt));
  }
}

// --- little-endian primitives over a byte buffer ---
struct Writer {
  std::vector<uint8_t> buf;

  void u8(uint8_t v) { buf.push_back(v); }
  void u16(uint16_t v) {
    buf.push_back(uint8_t(v));
    buf.push_back(uint8_t(v >> 8));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void bytes(const void *p, size_t n) {
    const uint8_t *b = static_cast<const uint8_t *>(p);
    buf.insert(buf.end(), b, b + n);
  }
};

struct Reader {
  const std::vector<uint8_t> &buf;
  size_t pos = 0;
  std::string path;

  void need(size_t n, const char *what) const {
    if (pos + n > buf.size())
      throw FormatError(path + ": truncated " + what + " at byte offset " +
                        std::to_string(pos) + " (need " + std::to_string(n) + ", have " +
                        std::to_string(buf.size() - pos) + ")");
  }
  uint8_t u8() {
    need(1, "field");
    return buf[pos++];
  }
  uint16_t u16() {
    need(2, "field");
    uint16_t v = uint16_t(buf[pos]) | uint16_t(buf[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4, "field");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8, "field");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string str(size_t n) {
    need(n, "string");
    std::string s(reinterpret_cast<const char *>(&buf[pos]), n);
    pos += n;
    return s;
  }
};

std::vector<uint8_t> slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
  return buf;
}

void dump(const std::string &path, const std::vector<uint8_t> &buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open file for writing");
  out.write(reinterpret_cast<const char *>(buf.data()), std::streamsize(buf.size()));
  if (!out) throw FormatError(path + ": write failed");
}

void write_header(Writer &w, const char magic[4], uint8_t dtype,
                  const std::vector<uint32_t> &dims) {
  w.bytes(magic, 4);
  w.u16(kFormatVersion);
  w.u8(dtype);
  w.u8(uint8_t(dims.size()));
  for (uint32_t d : dims) w.u32(d);
}

struct Header {
  std::string magic;
  uint16_t version = 0;
  uint8_t dtype = 0;
  std::vector<uint32_t> dims;
  size_t payload = 0; // element count
};

Header read_header(Reader &r, const char *expect_magic) {
  Header h;
  h.magic = r.str(4);
  if (h.magic != expect_magic)
    throw FormatError(r.path + ": bad magic '" + h.magic + "', expected '" +
                      expect_magic + "'");
  h.version = r.u16();
  if (h.version != kFormatVersion)
    throw FormatError(r.path + ": unsupported format version " +
                      std::to_string(h.version));
  h.dtype = r.u8();
  uint8_t nd = r.u8();
  if (nd == 0 || nd > 3)
    throw FormatError(r.path + ": header declares " + std::to_string(nd) + " dims");
  h.payload = 1;
  for (int i = 0; i < nd; ++i) {
    uint32_t d = r.u32();
    if (d == 0) throw FormatError(r.path + ": zero-length dimension in header");
    h.dims.push_back(d);
    h.payload *= d;
  }
  return h;
}

void check_exact_payload(const Reader &r, const Header &h) {
  size_t expected = h.payload * dtype_size(h.dtype);
  size_t have = r.buf.size() - r.pos;
  if (have != expected)
    throw FormatError(r.path + ": payload length mismatch at byte offset " +
                      std::to_string(r.pos) + ": expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(have));
}

void write_f32_grid(Writer &w, const std::vector<double> &data) {
  for (double v : data) w.f32(float(v));
}

void write_cf32_grid(Writer &w, const std::vector<cplx> &data) {
  for (const cplx &v : data) {
    w.f32(float(v.real()));
    w.f32(float(v.imag()));
  }
}

ModelConfig parse_config_text(const std::string &text, const std::string &path) {
  ModelConfig cfg;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ';')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw FormatError(path + ": malformed checkpoint config entry '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "in") cfg.in_channels = std::stoi(val);
    else if (key == "out") cfg.out_channels = std::stoi(val);
    else if (key == "feat") cfg.base_features = std::stoi(val);
    else if (key == "blocks") cfg.num_res_blocks = std::stoi(val);
    else if (key == "drop") cfg.dropout_prob = std::stod(val);
    else if (key == "rk") cfg.res_kernel = std::stoi(val);
    else if (key == "uk") cfg.updown_kernel = std::stoi(val);
    else if (key == "fk") cfg.final_kernel = std::stoi(val);
    else throw FormatError(path + ": unknown checkpoint config key '" + key + "'");
  }
  return cfg;
}

void write_tensor_blob(Writer &w, const Tensor &t) {
  w.u8(uint8_t(t.shape.size()));
  for (int d : t.shape) w.u32(uint32_t(d));
  write_f32_grid(w, t.v);
}

Tensor read_tensor_blob(Reader &r) {
  uint8_t nd = r.u8();
  std::vector<int> shape(nd);
  for (auto &d : shape) d = int(r.u32());
  Tensor t(shape);
  for (double &v : t.v) v = double(r.f32());
  return t;
}

} // namespace

void write_image(const std::string &path, const Image2D &img) {
  Writer w;
  write_header(w, "IMG1", DT_F32, {uint32_t(img.rows), uint32_t(img.cols)});
  write_f32_grid(w, img.data);
  dump(path, w.buf);
}

Image2D read_image(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "IMG1");
  if (h.dtype != DT_F32) throw FormatError(path + ": IMG1 dtype must be f32");
  if (h.dims.size() != 2) throw FormatError(path + ": expected a 2-dim IMG1 file");
  check_exact_payload(r, h);
  Image2D img(int(h.dims[0]), int(h.dims[1]));
  for (double &v : img.data) v = double(r.f32());
  return img;
}

void write_volume(const std::string &path, const Volume &vol) {
  if (vol.slices.empty()) throw InvalidInputError("write_volume: empty volume");
  Writer w;
  write_header(w, "IMG1", DT_F32,
               {uint32_t(vol.slices.size()), uint32_t(vol.rows()), uint32_t(vol.cols())});
  for (const Image2D &s : vol.slices) write_f32_grid(w, s.data);
  dump(path, w.buf);
}

Volume read_volume(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "IMG1");
  if (h.dtype != DT_F32) throw FormatError(path + ": IMG1 dtype must be f32");
  check_exact_payload(r, h);
  Volume vol;
  size_t n_slices = h.dims.size() == 3 ? h.dims[0] : 1;
  int rows = int(h.dims[h.dims.size() == 3 ? 1 : 0]);
  int cols = int(h.dims[h.dims.size() == 3 ? 2 : 1]);
  for (size_t s = 0; s < n_slices; ++s) {
    Image2D img(rows, cols);
    for (double &v : img.data) v = double(r.f32());
    vol.slices.push_back(std::move(img));
  }
  return vol;
}

void write_kspace(const std::string &path, const ComplexGrid2D &grid) {
  Writer w;
  write_header(w, "KSP1", DT_CF32, {uint32_t(grid.rows), uint32_t(grid.cols)});
  write_cf32_grid(w, grid.data);
  dump(path, w.buf);
}

ComplexGrid2D read_kspace(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "KSP1");
  if (h.dtype != DT_CF32) throw FormatError(path + ": KSP1 dtype must be complex-f32");
  if (h.dims.size() != 2) throw FormatError(path + ": expected a 2-dim KSP1 file");
  check_exact_payload(r, h);
  ComplexGrid2D g(int(h.dims[0]), int(h.dims[1]));
  for (cplx &v : g.data) {
    double re = double(r.f32());
    double im = double(r.f32());
    v = cplx(re, im);
  }
  return g;
}

void write_mask(const std::string &path, const CartesianMask &mask) {
  Writer w;
  write_header(w, "MSK1", DT_U8, {uint32_t(mask.rows), uint32_t(mask.cols)});
  w.u8(uint8_t(mask.kind));
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.u64(mask.seed);
  w.f32(float(mask.requested_fraction));
  w.bytes(mask.keep.data(), mask.keep.size());
  dump(path, w.buf);
}

CartesianMask read_mask(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "MSK1");
  if (h.dtype != DT_U8) throw FormatError(path + ": MSK1 dtype must be u8");
  if (h.dims.size() != 2) throw FormatError(path + ": expected a 2-dim MSK1 file");
  CartesianMask m;
  uint8_t kind = r.u8();
  if (kind < 1 || kind > 3) throw FormatError(path + ": bad mask kind code");
  r.u8();
  r.u8();
  r.u8();
  m.kind = MaskKind(kind);
  m.seed = r.u64();
  m.requested_fraction = double(r.f32());
  check_exact_payload(r, h);
  m.rows = int(h.dims[0]);
  m.cols = int(h.dims[1]);
  m.keep.assign(buf.begin() + long(r.pos), buf.end());
  for (uint8_t v : m.keep)
    if (v > 1) throw FormatError(path + ": mask payload must be 0/1");
  return m;
}

void write_trajectory(const std::string &path, const RadialTrajectory &traj) {
  Writer w;
  write_header(w, "TRJ1", DT_F32, {3});
  w.f32(float(traj.num_spokes));
  w.f32(float(traj.samples_per_spoke));
  w.f32(float(traj.start_angle_deg));
  dump(path, w.buf);
}

RadialTrajectory read_trajectory(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "TRJ1");
  if (h.dtype != DT_F32 || h.dims.size() != 1 || h.dims[0] != 3)
    throw FormatError(path + ": TRJ1 must carry 3 f32 parameters");
  check_exact_payload(r, h);
  float spokes = r.f32(), sps = r.f32(), start = r.f32();
  if (spokes < 1 || spokes != std::floor(spokes) || sps < 2 || sps != std::floor(sps))
    throw FormatError(path + ": TRJ1 parameters are not valid counts");
  return gen_golden_radial(int(spokes), int(sps), double(start));
}

void write_samples(const std::string &path, const SampleVector &sv) {
  Writer w;
  write_header(w, "SVC1", DT_CF32,
               {uint32_t(sv.num_spokes), uint32_t(sv.samples_per_spoke)});
  write_cf32_grid(w, sv.values);
  dump(path, w.buf);
}

SampleVector read_samples(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "SVC1");
  if (h.dtype != DT_CF32) throw FormatError(path + ": SVC1 dtype must be complex-f32");
  if (h.dims.size() != 2) throw FormatError(path + ": expected a 2-dim SVC1 file");
  check_exact_payload(r, h);
  SampleVector sv;
  sv.num_spokes = int(h.dims[0]);
  sv.samples_per_spoke = int(h.dims[1]);
  sv.values.resize(size_t(sv.num_spokes) * sv.samples_per_spoke);
  for (cplx &v : sv.values) {
    double re = double(r.f32());
    double im = double(r.f32());
    v = cplx(re, im);
  }
  return sv;
}

std::string peek_magic(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (in.gcount() != 4) throw FormatError(path + ": file shorter than a magic number");
  return std::string(magic, 4);
}

void write_checkpoint(const std::string &path, const ReconResNet &model, int epoch,
                      const AdamState *adam) {
  Writer blob;
  std::string cfg_text = model.config().canonical();
  blob.u32(uint32_t(cfg_text.size()));
  blob.bytes(cfg_text.data(), cfg_text.size());
  blob.u64(model.config().hash());
  blob.u32(uint32_t(epoch));

  uint32_t n_tensors = 0;
  model.for_each_param([&](const std::string &, const Tensor &) { ++n_tensors; });
  blob.u32(n_tensors);
  model.for_each_param([&](const std::string &name, const Tensor &t) {
    blob.u16(uint16_t(name.size()));
    blob.bytes(name.data(), name.size());
    write_tensor_blob(blob, t);
  });

  blob.u8(adam ? 1 : 0);
  if (adam) {
    blob.u64(adam->t);
    for (const Tensor &t : adam->m) write_tensor_blob(blob, t);
    for (const Tensor &t : adam->v) write_tensor_blob(blob, t);
  }

  Writer w;
  write_header(w, "CKPT", DT_U8, {uint32_t(blob.buf.size())});
  w.bytes(blob.buf.data(), blob.buf.size());
  dump(path, w.buf);
}

Checkpoint read_checkpoint(const std::string &path) {
  auto buf = slurp(path);
  Reader r{buf, 0, path};
  Header h = read_header(r, "CKPT");
  if (h.dtype != DT_U8 || h.dims.size() != 1)
    throw FormatError(path + ": CKPT must declare a u8 blob payload");
  check_exact_payload(r, h);

  Checkpoint ck;
  uint32_t text_len = r.u32();
  std::string cfg_text = r.str(text_len);
  uint64_t stored_hash = r.u64();
  ck.model_cfg = parse_config_text(cfg_text, path);
  if (ck.model_cfg.hash() != stored_hash)
    throw FormatError(path + ": checkpoint config hash mismatch (incompatible model)");
  ck.epoch = int(r.u32());

  uint32_t n_tensors = r.u32();
  ck.params.reserve(n_tensors);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    uint16_t name_len = r.u16();
    std::string name = r.str(name_len);
    ck.params.emplace_back(std::move(name), read_tensor_blob(r));
  }

  ck.has_adam = r.u8() != 0;
  if (ck.has_adam) {
    ck.adam.t = r.u64();
    ck.adam.m.reserve(n_tensors);
    ck.adam.v.reserve(n_tensors);
    for (uint32_t i = 0; i < n_tensors; ++i) ck.adam.m.push_back(read_tensor_blob(r));
    for (uint32_t i = 0; i < n_tensors; ++i) ck.adam.v.push_back(read_tensor_blob(r));
  }
  if (r.pos != buf.size())
    throw FormatError(path + ": trailing bytes after checkpoint blob");
  return ck;
}

ReconResNet model_from_checkpoint(const Checkpoint &ckpt) {
  ReconResNet model(ckpt.model_cfg, 0);
  size_t i = 0;
  model.for_each_param([&](const std::string &name, Tensor &t) {
    if (i >= ckpt.params.size())
      throw FormatError("checkpoint is missing tensor '" + name + "'");
    const auto &[ck_name, ck_t] = ckpt.params[i++];
    if (ck_name != name || ck_t.shape != t.shape)
      throw FormatError("checkpoint tensor '" + ck_name + "' does not match model '" +
                        name + "'");
    t.v = ck_t.v;
  });
  if (i != ckpt.params.size())
    throw FormatError("checkpoint carries extra tensors beyond the model");
  return model;
}

// --- NIfTI-1 ---
namespace {

std::vector<uint8_t> gunzip(const std::vector<uint8_t> &in, const std::string &path) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
    throw FormatError(path + ": zlib init failed");
  std::vector<uint8_t> out;
  out.reserve(in.size() * 4);
  std::vector<uint8_t> chunk(1 << 16);
  zs.next_in = const_cast<Bytef *>(in.data());
  zs.avail_in = uInt(in.size());
  int ret = Z_OK;
  while (ret != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = uInt(chunk.size());
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError(path + ": gzip decompression failed");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

int16_t le_i16(const uint8_t *p) { return int16_t(uint16_t(p[0]) | uint16_t(p[1]) << 8); }
int32_t le_i32(const uint8_t *p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
  return int32_t(v);
}
float le_f32(const uint8_t *p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

} // namespace

NiftiVolume read_nifti_minimal(const std::string &path) {
  std::vector<uint8_t> buf = slurp(path);
  if (buf.size() >= 2 && buf[0] == 0x1F && buf[1] == 0x8B) buf = gunzip(buf, path);
  if (buf.size() < 352) throw FormatError(path + ": file shorter than a NIfTI-1 header");

  int32_t sizeof_hdr = le_i32(&buf[0]);
  if (sizeof_hdr != 348) {
    if (sizeof_hdr == 1543569408) // 348 byte-swapped
      throw FormatError(path + ": byte-swapped NIfTI is not supported");
    throw FormatError(path + ": header size field is " + std::to_string(sizeof_hdr) +
                      ", expected 348");
  }
  std::string magic(reinterpret_cast<const char *>(&buf[344]), 3);
  if (magic == "ni1")
    throw FormatError(path + ": two-file (hdr/img) NIfTI is not supported");
  if (magic != "n+1") throw FormatError(path + ": NIfTI magic mismatch");

  int16_t ndim = le_i16(&buf[40]);
  int16_t dim[4] = {0, 0, 0, 0};
  for (int i = 1; i <= 3; ++i) dim[i] = le_i16(&buf[40 + 2 * i]);
  if (ndim < 3) throw FormatError(path + ": need a 3D NIfTI volume");
  for (int i = 4; i <= 7 && i <= ndim; ++i)
    if (le_i16(&buf[40 + 2 * i]) > 1)
      throw FormatError(path + ": higher-dimensional NIfTI is not supported");
  if (dim[1] < 1 || dim[2] < 1 || dim[3] < 1)
    throw FormatError(path + ": non-positive NIfTI dimensions");

  NiftiVolume nv;
  nv.meta.dims[0] = dim[1];
  nv.meta.dims[1] = dim[2];
  nv.meta.dims[2] = dim[3];
  nv.meta.datatype = le_i16(&buf[70]);
  for (int i = 0; i < 3; ++i) nv.meta.pixdim[i] = double(le_f32(&buf[76 + 4 * (i + 1)]));
  nv.meta.scl_slope = le_f32(&buf[112]);
  nv.meta.scl_inter = le_f32(&buf[116]);
  float vox_offset = le_f32(&buf[108]);

  size_t n = size_t(dim[1]) * dim[2] * dim[3];
  size_t off = size_t(vox_offset);
  size_t elem = 0;
  switch (nv.meta.datatype) {
    case 4: elem = 2; break;   // int16
    case 512: elem = 2; break; // uint16
    case 16: elem = 4; break;  // float32
    case 64: elem = 8; break;  // float64
    default:
      throw FormatError(path + ": unsupported NIfTI datatype " +
                        std::to_string(nv.meta.datatype));
  }
  if (off + n * elem > buf.size())
    throw FormatError(path + ": NIfTI payload truncated (expected " +
                      std::to_string(n * elem) + " bytes at offset " +
                      std::to_string(off) + ")");

  double slope = nv.meta.scl_slope == 0.0f ? 1.0 : double(nv.meta.scl_slope);
  double inter = double(nv.meta.scl_inter);
  nv.data.resize(n);
  const uint8_t *p = &buf[off];
  for (size_t i = 0; i < n; ++i) {
    double v = 0.0;
    switch (nv.meta.datatype) {
      case 4: v = double(le_i16(p + 2 * i)); break;
      case 512: v = double(uint16_t(le_i16(p + 2 * i))); break;
      case 16: v = double(le_f32(p + 4 * i)); break;
      case 64: {
        uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= uint64_t(p[8 * i + b]) << (8 * b);
        double d;
        std::memcpy(&d, &bits, 8);
        v = d;
        break;
      }
    }
    nv.data[i] = v * slope + inter;
  }
  return nv;
}

Volume nifti_slices(const NiftiVolume &nv, int axis) {
  if (axis < 0 || axis > 2) throw ConfigError("nifti_slices: axis must be 0, 1 or 2");
  const int nx = nv.meta.dims[0], ny = nv.meta.dims[1], nz = nv.meta.dims[2];
  auto at = [&](int x, int y, int z) {
    return nv.data[size_t(x) + size_t(nx) * (size_t(y) + size_t(ny) * z)];
  };
  // The two remaining axes become (rows, cols) in ascending order.
  Volume vol;
  vol.voxel_mm[0] = nv.meta.pixdim[0];
  vol.voxel_mm[1] = nv.meta.pixdim[1];
  vol.voxel_mm[2] = nv.meta.pixdim[2];
  int n_slices = nv.meta.dims[axis];
  for (int s = 0; s < n_slices; ++s) {
    Image2D img(axis == 0 ? ny : nx, axis == 2 ? ny : nz);
    for (int r = 0; r < img.rows; ++r)
      for (int c = 0; c < img.cols; ++c) {
        if (axis == 0) img.at(r, c) = at(s, r, c);
        else if (axis == 1) img.at(r, c) = at(r, s, c);
        else img.at(r, c) = at(r, c, s);
      }
    vol.slices.push_back(std::move(img));
  }
  return vol;
}

// --- manifest + CSV ---
void write_manifest(const std::string &path, const std::vector<ManifestRow> &rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open manifest for writing");
  out << "gt\tinput\tmeasured\tpattern\n";
  for (const ManifestRow &r : rows)
    out << r.gt << '\t' << r.input << '\t' << r.measured << '\t' << r.pattern << '\n';
  if (!out) throw FormatError(path + ": manifest write failed");
}

std::vector<ManifestRow> read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open manifest");
  std::string line;
  if (!std::getline(in, line) || line != "gt\tinput\tmeasured\tpattern")
    throw FormatError(path + ": missing manifest header line");
  std::vector<ManifestRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ManifestRow row;
    std::istringstream is(line);
    if (!std::getline(is, row.gt, '\t') || !std::getline(is, row.input, '\t') ||
        !std::getline(is, row.measured, '\t') || !std::getline(is, row.pattern, '\t'))
      throw FormatError(path + ": malformed manifest line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string parent_dir(const std::string &path) {
  fs::path p(path);
  return p.parent_path().string();
}

std::string join_path(const std::string &dir, const std::string &rel) {
  if (rel.empty()) return rel;
  fs::path r(rel);
  if (r.is_absolute() || dir.empty()) return rel;
  return (fs::path(dir) / r).string();
}

std::vector<TrainSample> load_training_set(const std::string &manifest_path) {
  std::string dir = parent_dir(manifest_path);
  std::vector<TrainSample> set;
  for (const ManifestRow &row : read_manifest(manifest_path)) {
    TrainSample s;
    s.input = read_image(join_path(dir, row.input));
    s.target = read_image(join_path(dir, row.gt));
    std::string base = fs::path(row.gt).filename().string();
    size_t cut = std::string::npos;
    for (size_t p = base.find("_s"); p != std::string::npos; p = base.find("_s", p + 1))
      if (p + 2 < base.size() && std::isdigit(uint8_t(base[p + 2]))) cut = p;
    s.group = cut == std::string::npos ? base : base.substr(0, cut);
    set.push_back(std::move(s));
  }
  return set;
}

void write_metrics_csv(const std::string &path, const MetricsReport &report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open report for writing");
  out << "slice,ssim,mse,nrmse\n";
  char buf[160];
  for (size_t i = 0; i < report.slices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f,%.9f\n", i, report.slices[i].ssim,
                  report.slices[i].mse, report.slices[i].nrmse);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean,%.9f,%.9f,%.9f\n", report.mean.ssim,
                report.mean.mse, report.mean.nrmse);
  out << buf;
  std::snprintf(buf, sizeof buf, "std,%.9f,%.9f,%.9f\n", report.stddev.ssim,
                report.stddev.mse, report.stddev.nrmse);
  out << buf;
  if (!out) throw FormatError(path + ": report write failed");
}

std::vector<double> read_metrics_csv_ssim(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open report");
  std::string line;
  if (!std::getline(in, line) || line.rfind("slice,ssim", 0) != 0)
    throw FormatError(path + ": not a metrics report CSV");
  std::vector<double> ssims;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c1 = line.find(',');
    if (c1 == std::string::npos) continue;
    std::string first = line.substr(0, c1);
    if (first == "mean" || first == "std") continue;
    auto c2 = line.find(',', c1 + 1);
    ssims.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  return ssims;
}

std::vector<std::pair<std::string, double>> read_nbv_table(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open NBV table");
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto c = line.find(',');
    if (c == std::string::npos)
      throw FormatError(path + ": expected 'subject_id,nbv_mm3' on line " +
                        std::to_string(line_no));
    rows.emplace_back(line.substr(0, c), std::stod(line.substr(c + 1)));
  }
  return rows;
}

} // namespace mrr::io
