/* Copyright 2026 The semocc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "semocc/io.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "semocc/error.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;

class ByteWriter {
 public:
  void Magic(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }
  void U16(std::uint16_t v) { Le(v, 2); }
  void U32(std::uint32_t v) { Le(v, 4); }
  void U64(std::uint64_t v) { Le(v, 8); }
  void F32(double v) { U32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

  const std::vector<char>& bytes() const { return bytes_; }
  void Reserve(std::size_t n) { bytes_.reserve(n); }

 private:
  void Le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  ByteReader(fs::path path, std::vector<char> bytes)
      : path_(std::move(path)), bytes_(std::move(bytes)) {}

  void ExpectMagic(std::string_view magic) {
    Need(magic.size(), "magic");
    if (std::string_view(bytes_.data() + offset_, magic.size()) != magic) {
      Fail("bad magic, expected '" + std::string(magic) + "'");
    }
    offset_ += magic.size();
  }
  std::uint16_t U16() { return static_cast<std::uint16_t>(Le(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Le(4)); }
  std::uint64_t U64() { return Le(8); }
  float F32() { return std::bit_cast<float>(U32()); }

  // Throws unless `count` more bytes are available.
  void Need(std::uint64_t count, const std::string& what) const {
    const std::uint64_t left = bytes_.size() - offset_;
    if (count > left) {
      std::ostringstream msg;
      msg << "truncated " << what << ": expected " << count
          << " more bytes (file size " << offset_ + count << "), actual file size "
          << bytes_.size();
      throw FormatError(path_.string(), offset_, msg.str());
    }
  }
  void ExpectEnd() const {
    if (offset_ != bytes_.size()) {
      Fail("trailing data: expected file size " + std::to_string(offset_) +
           ", actual " + std::to_string(bytes_.size()));
    }
  }
  [[noreturn]] void Fail(const std::string& what) const {
    throw FormatError(path_.string(), offset_, what);
  }
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t Le(int n) {
    Need(static_cast<std::uint64_t>(n), "field");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[offset_ + i]))
           << (8 * i);
    }
    offset_ += static_cast<std::uint64_t>(n);
    return v;
  }

  fs::path path_;
  std::vector<char> bytes_;
  std::uint64_t offset_ = 0;
};

ByteReader Open(const fs::path& path) { return ByteReader(path, ReadFileBytes(path)); }

std::uint32_t CheckedU32(std::uint64_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

MapHeader ReadMapHeaderFrom(ByteReader& r) {
  r.ExpectMagic("LSG1");
  MapHeader h;
  h.height = r.U32();
  h.width = r.U32();
  h.channels = r.U32();
  if (h.height == 0 || h.width == 0 || h.channels == 0) {
    r.Fail("map header has a zero dimension");
  }
  return h;
}

}  // namespace

std::vector<char> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const fs::path& path, const std::vector<char>& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ProcessingError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ProcessingError("short write to " + path.string());
}

void WritePointCloud(const fs::path& path, const PointCloud& cloud) {
  cloud.Validate();
  if (cloud.frame_index < 0) throw ValidationError("frame index must be non-negative");
  const bool labeled = cloud.labels.has_value();
  ByteWriter w;
  w.Reserve(24 + cloud.size() * (labeled ? 14 : 12));
  w.Magic("LPC1");
  w.U32(kPointCloudVersion);
  w.U32(static_cast<std::uint32_t>(cloud.frame_index));
  w.U64(cloud.size());
  w.U32(labeled ? 1u : 0u);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    w.F32(cloud.points[i].x());
    w.F32(cloud.points[i].y());
    w.F32(cloud.points[i].z());
    if (labeled) w.U16((*cloud.labels)[i]);
  }
  WriteFileBytes(path, w.bytes());
}

PointCloud ReadPointCloud(const fs::path& path) {
  ByteReader r = Open(path);
  r.ExpectMagic("LPC1");
  const std::uint32_t version = r.U32();
  if (version != kPointCloudVersion) {
    r.Fail("unsupported point cloud version " + std::to_string(version));
  }
  PointCloud cloud;
  cloud.frame_index = static_cast<int>(r.U32());
  const std::uint64_t count = r.U64();
  const std::uint32_t flags = r.U32();
  if (flags > 1u) r.Fail("unknown point cloud flags " + std::to_string(flags));
  const bool labeled = (flags & 1u) != 0;
  const std::uint64_t stride = labeled ? 14 : 12;
  if (count > std::numeric_limits<std::uint64_t>::max() / stride) {
    r.Fail("point count overflows");
  }
  r.Need(count * stride, "point payload");
  cloud.points.resize(count);
  if (labeled) cloud.labels.emplace(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double x = r.F32();
    const double y = r.F32();
    const double z = r.F32();
    cloud.points[i] = Eigen::Vector3d(x, y, z);
    if (labeled) (*cloud.labels)[i] = r.U16();
  }
  r.ExpectEnd();
  cloud.Validate();
  return cloud;
}

MapHeader ReadMapHeader(const fs::path& path) {
  ByteReader r = Open(path);
  return ReadMapHeaderFrom(r);
}

void WriteSegmentationMap(const fs::path& path, const SegmentationMap& map) {
  ByteWriter w;
  w.Magic("LSG1");
  w.U32(static_cast<std::uint32_t>(map.height()));
  w.U32(static_cast<std::uint32_t>(map.width()));
  w.U32(1);
  for (LabelId id : map.labels()) w.U16(id);
  WriteFileBytes(path, w.bytes());
}

SegmentationMap ReadSegmentationMap(const fs::path& path) {
  ByteReader r = Open(path);
  const MapHeader h = ReadMapHeaderFrom(r);
  if (h.channels != 1) {
    r.Fail("expected a label map (1 channel), found " + std::to_string(h.channels) +
           " channels");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(h.height) * h.width;
  r.Need(cells * 2, "label payload");
  std::vector<LabelId> labels(cells);
  for (auto& id : labels) id = r.U16();
  r.ExpectEnd();
  return SegmentationMap(static_cast<int>(h.width), static_cast<int>(h.height),
                         std::move(labels));
}

void WriteFeatureMap(const fs::path& path, const FeatureMap& map) {
  if (map.channels() < 2) {
    throw ValidationError("feature maps need at least 2 channels in LSG1");
  }
  ByteWriter w;
  w.Magic("LSG1");
  w.U32(static_cast<std::uint32_t>(map.height()));
  w.U32(static_cast<std::uint32_t>(map.width()));
  w.U32(static_cast<std::uint32_t>(map.channels()));
  for (float f : map.data()) w.U32(std::bit_cast<std::uint32_t>(f));
  WriteFileBytes(path, w.bytes());
}

FeatureMap ReadFeatureMap(const fs::path& path) {
  ByteReader r = Open(path);
  const MapHeader h = ReadMapHeaderFrom(r);
  if (h.channels < 2) r.Fail("expected a feature map (>1 channels)");
  const std::uint64_t values =
      static_cast<std::uint64_t>(h.height) * h.width * h.channels;
  r.Need(values * 4, "feature payload");
  std::vector<float> data(values);
  for (auto& f : data) f = r.F32();
  r.ExpectEnd();
  return FeatureMap(static_cast<int>(h.width), static_cast<int>(h.height),
                    static_cast<int>(h.channels), std::move(data));
}

void WriteEmbeddings(const fs::path& path, const Eigen::MatrixXd& rows) {
  ByteWriter w;
  w.Magic("LEM1");
  w.U32(CheckedU32(static_cast<std::uint64_t>(rows.rows()), "row count"));
  w.U32(CheckedU32(static_cast<std::uint64_t>(rows.cols()), "dimension"));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) w.F32(rows(i, j));
  }
  WriteFileBytes(path, w.bytes());
}

Eigen::MatrixXd ReadEmbeddings(const fs::path& path) {
  ByteReader r = Open(path);
  r.ExpectMagic("LEM1");
  const std::uint32_t n = r.U32();
  const std::uint32_t d = r.U32();
  if (d == 0) r.Fail("embedding dimension is zero");
  r.Need(static_cast<std::uint64_t>(n) * d * 4, "embedding payload");
  Eigen::MatrixXd rows(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) rows(i, j) = r.F32();
  }
  r.ExpectEnd();
  return rows;
}

void WriteVocabulary(const fs::path& path, const VocabularySet& vocab) {
  std::ostringstream out;
  for (const auto& label : vocab.labels()) out << label << "\n";
  const std::string text = out.str();
  WriteFileBytes(path, std::vector<char>(text.begin(), text.end()));
}

VocabularySet ReadVocabulary(const fs::path& path, VocabScope scope) {
  auto lines = ReadLines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  try {
    return VocabularySet(lines, scope);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void WriteVoxelGrid(const fs::path& path, const VoxelGrid& grid) {
  if (grid.labels.size() != grid.spec.voxel_count()) {
    throw ValidationError("voxel grid label count does not match its dims");
  }
  ByteWriter w;
  w.Reserve(32 + grid.labels.size() * 2);
  w.Magic("LVX1");
  for (int a = 0; a < 3; ++a) w.F32(grid.spec.origin()[a]);
  w.F32(grid.spec.voxel_size());
  for (int d : grid.spec.dims()) w.U32(static_cast<std::uint32_t>(d));
  for (LabelId id : grid.labels) w.U16(id);
  WriteFileBytes(path, w.bytes());
}

VoxelGrid ReadVoxelGrid(const fs::path& path) {
  ByteReader r = Open(path);
  r.ExpectMagic("LVX1");
  Eigen::Vector3d origin;
  for (int a = 0; a < 3; ++a) origin[a] = r.F32();
  const double voxel = r.F32();
  std::array<int, 3> dims;
  for (auto& d : dims) {
    const std::uint32_t v = r.U32();
    if (v == 0 || v > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      r.Fail("invalid grid dimension " + std::to_string(v));
    }
    d = static_cast<int>(v);
  }
  if (!(voxel > 0.0)) r.Fail("voxel size must be positive");
  VoxelGrid grid(GridSpec(origin, voxel, dims));
  r.Need(grid.labels.size() * 2, "voxel payload");
  for (auto& id : grid.labels) id = r.U16();
  r.ExpectEnd();
  return grid;
}

void WriteCheckpoint(const fs::path& path, const AutoencoderParams& params) {
  params.Validate();
  std::vector<const DenseLayer*> layers;
  for (const auto& l : params.encoder) layers.push_back(&l);
  for (const auto& l : params.decoder) layers.push_back(&l);
  ByteWriter w;
  w.Magic("LAE1");
  w.U32(static_cast<std::uint32_t>(layers.size()));
  for (const auto* l : layers) {
    w.U32(static_cast<std::uint32_t>(l->out_dim()));
    w.U32(static_cast<std::uint32_t>(l->in_dim()));
    w.U32(static_cast<std::uint32_t>(l->activation));
  }
  for (const auto* l : layers) {
    for (Eigen::Index i = 0; i < l->weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < l->weight.cols(); ++j) w.F32(l->weight(i, j));
    }
    for (Eigen::Index i = 0; i < l->bias.size(); ++i) w.F32(l->bias[i]);
  }
  WriteFileBytes(path, w.bytes());
}

AutoencoderParams ReadCheckpoint(const fs::path& path) {
  ByteReader r = Open(path);
  r.ExpectMagic("LAE1");
  const std::uint32_t count = r.U32();
  if (count < 2) r.Fail("checkpoint needs at least 2 layers");
  r.Need(static_cast<std::uint64_t>(count) * 12, "layer table");
  std::vector<DenseLayer> layers(count);
  std::uint32_t narrowest = std::numeric_limits<std::uint32_t>::max();
  for (auto& layer : layers) {
    const std::uint32_t rows = r.U32();
    const std::uint32_t cols = r.U32();
    const std::uint32_t act = r.U32();
    if (rows == 0 || cols == 0) r.Fail("layer with zero dimension");
    if (act > static_cast<std::uint32_t>(Activation::kSoftplus)) {
      r.Fail("unknown activation tag " + std::to_string(act));
    }
    layer.weight.resize(rows, cols);
    layer.bias.resize(rows);
    layer.activation = static_cast<Activation>(act);
    narrowest = std::min(narrowest, rows);
  }
  for (auto& layer : layers) {
    r.Need(static_cast<std::uint64_t>(layer.weight.size() + layer.bias.size()) * 4,
           "layer payload");
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = r.F32();
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = r.F32();
  }
  r.ExpectEnd();
  AutoencoderParams params;
  std::size_t split = 0;
  while (static_cast<std::uint32_t>(layers[split].out_dim()) != narrowest) ++split;
  params.encoder.assign(layers.begin(), layers.begin() + split + 1);
  params.decoder.assign(layers.begin() + split + 1, layers.end());
  try {
    params.Validate();
  } catch (const ValidationError& e) {
    throw FormatError(path.string(), r.offset(), e.what());
  }
  return params;
}

ClassSet ReadClassSet(const fs::path& path) {
  ClassSet classes;
  bool any_base = false;
  std::vector<bool> base;
  for (const auto& raw : ReadLines(path)) {
    if (raw.empty()) continue;
    std::string name = raw;
    bool is_base = false;
    if (auto tab = raw.find('\t'); tab != std::string::npos) {
      name = raw.substr(0, tab);
      const std::string flag = CanonicalizeLabel(raw.substr(tab + 1));
      if (flag == "base") {
        is_base = true;
      } else if (flag != "novel" && !flag.empty()) {
        throw ValidationError(path.string() + ": unknown class flag '" + flag + "'");
      }
    }
    classes.semantic.push_back(CanonicalizeLabel(name));
    base.push_back(is_base);
    any_base = any_base || is_base;
  }
  if (any_base) classes.base_mask = base;
  classes.Validate();
  return classes;
}

void WriteClassSet(const fs::path& path, const ClassSet& classes) {
  std::ostringstream out;
  for (std::size_t i = 0; i < classes.semantic.size(); ++i) {
    out << classes.semantic[i];
    if (!classes.base_mask.empty()) out << '\t' << (classes.base_mask[i] ? "base" : "novel");
    out << "\n";
  }
  const std::string text = out.str();
  WriteFileBytes(path, std::vector<char>(text.begin(), text.end()));
}

std::map<std::string, std::string> ReadClassOverrides(const fs::path& path) {
  std::map<std::string, std::string> overrides;
  int line_no = 0;
  for (const auto& raw : ReadLines(path)) {
    ++line_no;
    const std::string line = raw.substr(0, raw.find('#'));
    if (CanonicalizeLabel(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'label<TAB>class'");
    }
    overrides[CanonicalizeLabel(line.substr(0, tab))] =
        CanonicalizeLabel(line.substr(tab + 1));
  }
  return overrides;
}

}  // namespace semocc
