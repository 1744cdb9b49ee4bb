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
#include "semocc/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "json_util.h"
#include "semocc/error.h"
#include "semocc/io.h"
#include "semocc/parallel.h"

namespace semocc {
namespace {

namespace fs = std::filesystem;
using internal::Get;
using internal::GetOr;
using internal::GetVector3;
using internal::GetVector3Or;
using internal::json;

constexpr int kGtSubsamples = 4;
constexpr double kRayEpsilon = 1e-9;

enum Stream : std::uint64_t {
  kEmbeddingStream = 1,
  kLidarStream = 2,
  kVocabStream = 3,
  kNoiseStream = 4,
  kJitterStream = 5,
};

// Sub-generator for one (stream, frame, camera) triple of a master seed.
std::mt19937_64 SubRng(std::uint64_t seed, Stream stream, std::uint64_t frame = 0,
                       std::uint64_t camera = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(frame),
                    static_cast<std::uint32_t>(camera)};
  return std::mt19937_64(seq);
}

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double StandardNormal(std::mt19937_64& rng) {
  double u1 = Uniform01(rng);
  while (u1 <= 0.0) u1 = Uniform01(rng);
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// A primitive posed in one frame's ego coordinates.
struct PosedPrimitive {
  Primitive::Shape shape;
  LabelId label;
  RigidTransform local_from_ego;
  Eigen::Vector3d half;
  Eigen::Vector3d lo;  // ego-space bounding box
  Eigen::Vector3d hi;
  double top = 0.0;    // ground only
};

RigidTransform WorldFromEgo(const SceneConfig& cfg, int frame) {
  return RigidTransform::FromYaw(cfg.ego_yaw, cfg.ego_start + frame * cfg.ego_velocity);
}

RigidTransform WorldFromBox(const Primitive& p, int frame) {
  return RigidTransform::FromYaw(p.yaw, p.center + frame * p.velocity);
}

std::array<Eigen::Vector3d, 8> Corners(const RigidTransform& ego_from_local,
                                       const Eigen::Vector3d& half) {
  std::array<Eigen::Vector3d, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d s((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
    out[i] = ego_from_local.Apply(s.cwiseProduct(half));
  }
  return out;
}

std::vector<PosedPrimitive> PosePrimitives(const SceneConfig& cfg, const VocabularySet& labels,
                                           int frame) {
  const RigidTransform ego_from_world = Invert(WorldFromEgo(cfg, frame));
  std::vector<PosedPrimitive> out;
  for (const Primitive& p : cfg.primitives) {
    PosedPrimitive pp;
    pp.shape = p.shape;
    pp.label = *labels.Find(p.label);
    if (p.shape == Primitive::Shape::kGround) {
      pp.top = p.height - (cfg.ego_start.z() + frame * cfg.ego_velocity.z());
      const double inf = std::numeric_limits<double>::infinity();
      pp.lo = Eigen::Vector3d(-inf, -inf, -inf);
      pp.hi = Eigen::Vector3d(inf, inf, pp.top);
    } else {
      const RigidTransform ego_from_local = Compose(ego_from_world, WorldFromBox(p, frame));
      pp.local_from_ego = Invert(ego_from_local);
      pp.half = 0.5 * p.size;
      pp.lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
      pp.hi = -pp.lo;
      for (const auto& c : Corners(ego_from_local, pp.half)) {
        pp.lo = pp.lo.cwiseMin(c);
        pp.hi = pp.hi.cwiseMax(c);
      }
    }
    out.push_back(std::move(pp));
  }
  return out;
}

bool Inside(const PosedPrimitive& p, const Eigen::Vector3d& q) {
  if (p.shape == Primitive::Shape::kGround) return q.z() <= p.top;
  const Eigen::Vector3d l = p.local_from_ego.Apply(q);
  return std::abs(l.x()) <= p.half.x() && std::abs(l.y()) <= p.half.y() &&
         std::abs(l.z()) <= p.half.z();
}

// Smallest t > epsilon where the ray enters (or, from inside, leaves) p.
std::optional<double> Intersect(const PosedPrimitive& p, const Eigen::Vector3d& o,
                                const Eigen::Vector3d& d) {
  if (p.shape == Primitive::Shape::kGround) {
    if (d.z() >= 0.0 || o.z() <= p.top) return std::nullopt;
    return (p.top - o.z()) / d.z();
  }
  const Eigen::Vector3d lo = p.local_from_ego.Apply(o);
  const Eigen::Vector3d ld = p.local_from_ego.ApplyRotation(d);
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(ld[a]) < 1e-15) {
      if (std::abs(lo[a]) > p.half[a]) return std::nullopt;
      continue;
    }
    double ta = (-p.half[a] - lo[a]) / ld[a];
    double tb = (p.half[a] - lo[a]) / ld[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 < t0 || t1 <= kRayEpsilon) return std::nullopt;
  return t0 > kRayEpsilon ? t0 : t1;
}

RayHit Cast(const std::vector<PosedPrimitive>& prims, const Eigen::Vector3d& o,
            const Eigen::Vector3d& d) {
  RayHit best;
  best.t = std::numeric_limits<double>::infinity();
  for (const auto& p : prims) {
    const auto t = Intersect(p, o, d);
    if (t && *t < best.t) best = RayHit{p.label, *t};
  }
  return best;
}

// Majority primitive over kGtSubsamples^3 samples per voxel, ties to the
// earliest primitive.
VoxelGrid GroundTruth(const GridSpec& spec, const std::vector<PosedPrimitive>& prims) {
  VoxelGrid grid(spec);
  const double vs = spec.voxel_size();
  std::vector<int> counts(prims.size());
  for (std::size_t v = 0; v < grid.labels.size(); ++v) {
    const auto c = spec.Coords(v);
    const Eigen::Vector3d lo = spec.origin() + vs * Eigen::Vector3d(c[0], c[1], c[2]);
    const Eigen::Vector3d hi = lo + Eigen::Vector3d::Constant(vs);
    std::fill(counts.begin(), counts.end(), 0);
    bool any = false;
    for (std::size_t k = 0; k < prims.size(); ++k) {
      const auto& p = prims[k];
      if ((p.lo.array() > hi.array()).any() || (p.hi.array() < lo.array()).any()) continue;
      for (int i = 0; i < kGtSubsamples; ++i) {
        for (int j = 0; j < kGtSubsamples; ++j) {
          for (int l = 0; l < kGtSubsamples; ++l) {
            const Eigen::Vector3d q =
                lo + vs / kGtSubsamples * Eigen::Vector3d(i + 0.5, j + 0.5, l + 0.5);
            if (Inside(p, q)) ++counts[k];
          }
        }
      }
      any = any || counts[k] > 0;
    }
    if (!any) continue;
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    grid.labels[v] = prims[best].label;
  }
  return grid;
}

double Lerp(double a, double b, int i, int n) {
  return n <= 1 ? a : a + (b - a) * i / (n - 1);
}

Eigen::Vector3d CameraCenter(const CameraModel& cam) {
  return -(cam.cam_from_ego.rotation().transpose() * cam.cam_from_ego.translation());
}

SegmentationMap Render(const CameraModel& cam, const std::vector<PosedPrimitive>& prims) {
  SegmentationMap map(cam.width, cam.height);
  const Eigen::Matrix3d k_inv = cam.intrinsics.inverse();
  const Eigen::Matrix3d ego_from_cam = cam.cam_from_ego.rotation().transpose();
  const Eigen::Vector3d o = CameraCenter(cam);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Eigen::Vector3d d = ego_from_cam * (k_inv * Eigen::Vector3d(u + 0.5, v + 0.5, 1.0));
      map.set(u, v, Cast(prims, o, d).label);
    }
  }
  return map;
}

// Per-frame vocabulary: visible labels in global order, subsampled.
VocabularySet FrameVocab(const SceneConfig& cfg, const VocabularySet& labels,
                         const std::vector<SegmentationMap>& truth, int frame) {
  std::vector<bool> seen(labels.size(), false);
  for (const auto& m : truth) {
    for (LabelId id : m.labels()) {
      if (!IsSentinel(id)) seen[id] = true;
    }
  }
  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) visible.push_back(i);
  }
  if (cfg.vocab_keep < 1.0 && !visible.empty()) {
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(cfg.vocab_keep * visible.size())));
    auto rng = SubRng(cfg.seed, kVocabStream, static_cast<std::uint64_t>(frame));
    for (std::size_t i = 0; i + 1 < visible.size(); ++i) {
      const std::size_t j = i + rng() % (visible.size() - i);
      std::swap(visible[i], visible[j]);
    }
    visible.resize(keep);
    std::sort(visible.begin(), visible.end());
  }
  std::vector<std::string> names;
  for (auto i : visible) names.push_back(labels.labels()[i]);
  return VocabularySet(names, VocabScope::kPerFrame);
}

// Segmentation against `vocab`: a true label the vocabulary lacks becomes its
// most cosine-similar vocabulary label; then each labeled pixel flips to a
// uniformly drawn other label with probability label_noise.
std::vector<SegmentationMap> Segment(const SyntheticScene& scene, int frame,
                                     const VocabularySet& vocab) {
  const SceneConfig& cfg = scene.config;
  std::vector<LabelId> lookup(scene.labels.size(), kUnlabeled);
  if (vocab.size() > 0) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(vocab.size()), scene.embeddings.dim());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) =
          scene.embeddings.row(*scene.labels.Find(vocab.labels()[i]));
    }
    const EmbeddingMatrix vocab_emb(std::move(rows));
    for (std::size_t g = 0; g < scene.labels.size(); ++g) {
      const auto direct = vocab.Find(scene.labels.labels()[g]);
      lookup[g] = direct ? *direct
                         : Classify(scene.embeddings.row(static_cast<Eigen::Index>(g)).transpose(),
                                    vocab_emb)
                               .label;
    }
  }
  const SyntheticFrame& f = scene.frames[frame];
  std::vector<SegmentationMap> maps;
  for (std::size_t c = 0; c < f.truth.size(); ++c) {
    SegmentationMap map = f.truth[c];
    auto rng = SubRng(cfg.seed, kNoiseStream, static_cast<std::uint64_t>(frame), c);
    for (auto& id : map.mutable_labels()) {
      const double flip = Uniform01(rng);
      const double pick = Uniform01(rng);
      if (IsSentinel(id)) continue;
      id = lookup[id];
      if (flip < cfg.label_noise && vocab.size() >= 2) {
        auto other = static_cast<LabelId>(pick * static_cast<double>(vocab.size() - 1));
        if (other >= id) ++other;
        id = other;
      }
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

VocabularySet MergedFrameVocab(const SyntheticScene& scene) {
  std::vector<VocabularySet> vocabs;
  for (const auto& f : scene.frames) vocabs.push_back(f.frame_vocab);
  return MergeSequenceVocab(vocabs);
}

Primitive::Shape ParseShape(const std::string& s, const std::string& where) {
  if (s == "box") return Primitive::Shape::kBox;
  if (s == "ground") return Primitive::Shape::kGround;
  throw ValidationError(where + ".shape: expected box or ground, got '" + s + "'");
}

}  // namespace

CameraModel SyntheticCamera::Model() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ValidationError("camera '" + name + "' has a non-positive focal length");
  }
  const double sy = std::sin(yaw), cy_ = std::cos(yaw);
  const double sp = std::sin(pitch), cp = std::cos(pitch);
  const Eigen::Vector3d right(sy, -cy_, 0.0);
  const Eigen::Vector3d forward(cy_ * cp, sy * cp, sp);
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right;
  r.row(1) = down;
  r.row(2) = forward;
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = fx;
  k(1, 1) = fy;
  k(0, 2) = cx.value_or(width / 2.0);
  k(1, 2) = cy.value_or(height / 2.0);
  return CameraModel(k, RigidTransform(r, -(r * position)), width, height);
}

void SceneConfig::Validate() const {
  if (frames < 1) throw ValidationError("scene needs at least one frame");
  if (TargetFrame() < 0 || TargetFrame() >= frames) {
    throw ValidationError("target frame " + std::to_string(TargetFrame()) + " out of range");
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw ValidationError("label_noise must lie in [0, 0.5)");
  }
  if (!(box_margin >= 0.0)) throw ValidationError("box_margin must be non-negative");
  if (embedding_dim < 2) throw ValidationError("embedding_dim must be at least 2");
  if (!(vocab_keep > 0.0 && vocab_keep <= 1.0)) {
    throw ValidationError("vocab_keep must lie in (0, 1]");
  }
  if (layout_jitter_voxels < 0) throw ValidationError("layout_jitter_voxels must be >= 0");
  if (lidar.rings < 1 || lidar.azimuth_steps < 1) {
    throw ValidationError("lidar needs at least one ring and one azimuth step");
  }
  if (!(lidar.max_range > 0.0) || !(lidar.noise_std >= 0.0)) {
    throw ValidationError("lidar max_range must be positive and noise_std non-negative");
  }
  if (cameras.empty()) throw ValidationError("scene needs at least one camera");
  for (const auto& cam : cameras) cam.Model();

  const Eigen::Vector3d lo = grid.origin();
  const Eigen::Vector3d hi = grid.max_corner();
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const Primitive& p = primitives[i];
    const std::string where = "primitive " + std::to_string(i);
    if (CanonicalizeLabel(p.label).empty()) throw ValidationError(where + " has no label");
    if (CanonicalizeLabel(p.label) == "free") {
      throw ValidationError(where + " uses the reserved label 'free'");
    }
    if (p.shape == Primitive::Shape::kGround) {
      for (int k = 0; k < frames; ++k) {
        const double ego_z = ego_start.z() + k * ego_velocity.z();
        for (const auto& cam : cameras) {
          if (cam.position.z() + ego_z <= p.height) {
            throw ValidationError("camera '" + cam.name + "' is below the ground");
          }
        }
        if (lidar.position.z() + ego_z <= p.height) {
          throw ValidationError("lidar is below the ground");
        }
      }
      continue;
    }
    if ((p.size.array() <= 0.0).any()) throw ValidationError(where + " has a non-positive size");
    for (int k = 0; k < frames; ++k) {
      const RigidTransform ego_from_local =
          Compose(Invert(RigidTransform::FromYaw(ego_yaw, ego_start + k * ego_velocity)),
                  RigidTransform::FromYaw(p.yaw, p.center + k * p.velocity));
      for (const auto& c : Corners(ego_from_local, 0.5 * p.size)) {
        if ((c.array() < lo.array()).any() || (c.array() > hi.array()).any()) {
          throw ValidationError(where + " ('" + p.label + "') leaves the grid in frame " +
                                std::to_string(k));
        }
      }
    }
  }
}

SceneConfig ParseSceneConfig(std::string_view json_text) {
  const json root = internal::ParseJson(json_text, "scene config");
  if (!root.is_object()) throw ValidationError("scene config root must be an object");
  const std::string top = "scene";
  SceneConfig cfg;
  cfg.seed = GetOr<std::uint64_t>(root, "seed", top, 0);
  cfg.frames = GetOr<int>(root, "frames", top, 1);
  if (root.contains("target_frame")) cfg.target_frame = Get<int>(root, "target_frame", top);
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    const auto dims = Get<std::vector<int>>(g, "dims", "grid");
    if (dims.size() != 3) throw ValidationError("grid.dims: expected 3 values");
    cfg.grid = GridSpec(GetVector3(g, "origin", "grid"), Get<double>(g, "voxel_size", "grid"),
                        {dims[0], dims[1], dims[2]});
  }
  if (root.contains("ego")) {
    const json& e = root.at("ego");
    cfg.ego_start = GetVector3Or(e, "start", "ego", cfg.ego_start);
    cfg.ego_velocity = GetVector3Or(e, "velocity", "ego", cfg.ego_velocity);
    cfg.ego_yaw = GetOr<double>(e, "yaw", "ego", 0.0);
  }
  for (const json& c : GetOr<json>(root, "cameras", top, json::array())) {
    const std::string where = "cameras[" + std::to_string(cfg.cameras.size()) + "]";
    SyntheticCamera cam;
    cam.name = GetOr<std::string>(c, "name", where, "cam" + std::to_string(cfg.cameras.size()));
    cam.width = Get<int>(c, "width", where);
    cam.height = Get<int>(c, "height", where);
    cam.fx = Get<double>(c, "fx", where);
    cam.fy = GetOr<double>(c, "fy", where, cam.fx);
    if (c.contains("cx")) cam.cx = Get<double>(c, "cx", where);
    if (c.contains("cy")) cam.cy = Get<double>(c, "cy", where);
    cam.yaw = GetOr<double>(c, "yaw", where, 0.0);
    cam.pitch = GetOr<double>(c, "pitch", where, 0.0);
    cam.position = GetVector3Or(c, "position", where, cam.position);
    cfg.cameras.push_back(std::move(cam));
  }
  if (root.contains("lidar")) {
    const json& l = root.at("lidar");
    LidarPattern& p = cfg.lidar;
    p.rings = GetOr<int>(l, "rings", "lidar", p.rings);
    p.elevation_min = GetOr<double>(l, "elevation_min", "lidar", p.elevation_min);
    p.elevation_max = GetOr<double>(l, "elevation_max", "lidar", p.elevation_max);
    p.azimuth_steps = GetOr<int>(l, "azimuth_steps", "lidar", p.azimuth_steps);
    p.azimuth_min = GetOr<double>(l, "azimuth_min", "lidar", p.azimuth_min);
    p.azimuth_max = GetOr<double>(l, "azimuth_max", "lidar", p.azimuth_max);
    p.max_range = GetOr<double>(l, "max_range", "lidar", p.max_range);
    p.noise_std = GetOr<double>(l, "noise_std", "lidar", p.noise_std);
    p.position = GetVector3Or(l, "position", "lidar", p.position);
  }
  for (const json& j : GetOr<json>(root, "primitives", top, json::array())) {
    const std::string where = "primitives[" + std::to_string(cfg.primitives.size()) + "]";
    Primitive p;
    p.shape = ParseShape(Get<std::string>(j, "shape", where), where);
    p.label = Get<std::string>(j, "label", where);
    if (p.shape == Primitive::Shape::kGround) {
      p.height = Get<double>(j, "height", where);
    } else {
      p.center = GetVector3(j, "center", where);
      p.size = GetVector3(j, "size", where);
      p.yaw = GetOr<double>(j, "yaw", where, 0.0);
      p.velocity = GetVector3Or(j, "velocity", where, p.velocity);
    }
    cfg.primitives.push_back(std::move(p));
  }
  cfg.label_noise = GetOr<double>(root, "label_noise", top, cfg.label_noise);
  cfg.box_margin = GetOr<double>(root, "box_margin", top, cfg.box_margin);
  cfg.embedding_dim = GetOr<int>(root, "embedding_dim", top, cfg.embedding_dim);
  cfg.vocab_keep = GetOr<double>(root, "vocab_keep", top, cfg.vocab_keep);
  if (root.contains("vocab_scope")) {
    cfg.vocab_scope = ParseVocabMode(Get<std::string>(root, "vocab_scope", top));
  }
  cfg.layout_jitter_voxels = GetOr<int>(root, "layout_jitter_voxels", top, 0);
  cfg.Validate();
  return cfg;
}

SceneConfig LoadSceneConfig(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return ParseSceneConfig(std::string_view(bytes.data(), bytes.size()));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

ClassSet SyntheticScene::Classes() const {
  ClassSet classes;
  classes.semantic = labels.labels();
  return classes;
}

SyntheticScene Generate(const SceneConfig& input, int workers) {
  SyntheticScene scene;
  scene.config = input;
  SceneConfig& cfg = scene.config;
  if (cfg.layout_jitter_voxels > 0) {
    auto rng = SubRng(cfg.seed, kJitterStream);
    const auto span = static_cast<std::uint64_t>(2 * cfg.layout_jitter_voxels + 1);
    for (auto& p : cfg.primitives) {
      if (p.shape != Primitive::Shape::kBox) continue;
      for (int a = 0; a < 2; ++a) {
        const auto shift = static_cast<int>(rng() % span) - cfg.layout_jitter_voxels;
        p.center[a] += shift * cfg.grid.voxel_size();
      }
    }
  }
  cfg.Validate();

  std::vector<std::string> names;
  for (const auto& p : cfg.primitives) {
    const std::string name = CanonicalizeLabel(p.label);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  scene.labels = VocabularySet(names, VocabScope::kDataset);
  {
    auto rng = SubRng(cfg.seed, kEmbeddingStream);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(names.size()), cfg.embedding_dim);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = StandardNormal(rng);
    }
    scene.embeddings = EmbeddingMatrix(NormalizeRows(rows));
  }
  for (const auto& cam : cfg.cameras) {
    scene.camera_names.push_back(cam.name);
    scene.rig.push_back(cam.Model());
  }
  for (int k = 0; k < cfg.frames; ++k) {
    scene.poses.push_back(EgoPose{WorldFromEgo(cfg, k), k});
    const RigidTransform ego_from_world = Invert(WorldFromEgo(cfg, k));
    for (std::size_t i = 0; i < cfg.primitives.size(); ++i) {
      const Primitive& p = cfg.primitives[i];
      if (p.shape != Primitive::Shape::kBox) continue;
      BoundingBox3D box;
      box.track_id = CanonicalizeLabel(p.label) + "#" + std::to_string(i);
      box.frame_index = k;
      box.center = ego_from_world.Apply(p.center + k * p.velocity);
      box.size = p.size + Eigen::Vector3d::Constant(2.0 * cfg.box_margin);
      box.yaw = p.yaw - cfg.ego_yaw;
      box.is_moving = p.velocity.squaredNorm() > 0.0;
      scene.boxes.push_back(std::move(box));
    }
  }

  scene.frames.resize(static_cast<std::size_t>(cfg.frames));
  ParallelFor(scene.frames.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int frame = static_cast<int>(k);
      SyntheticFrame& f = scene.frames[k];
      const auto prims = PosePrimitives(cfg, scene.labels, frame);
      f.gt = GroundTruth(cfg.grid, prims);
      for (const auto& cam : scene.rig) f.truth.push_back(Render(cam, prims));
      f.frame_vocab = FrameVocab(cfg, scene.labels, f.truth, frame);

      const LidarPattern& lp = cfg.lidar;
      auto rng = SubRng(cfg.seed, kLidarStream, k);
      f.cloud.frame_index = frame;
      for (int i = 0; i < lp.rings; ++i) {
        const double e = Lerp(lp.elevation_min, lp.elevation_max, i, lp.rings);
        for (int j = 0; j < lp.azimuth_steps; ++j) {
          const double a = Lerp(lp.azimuth_min, lp.azimuth_max, j, lp.azimuth_steps);
          const Eigen::Vector3d d(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a),
                                  std::sin(e));
          const RayHit hit = Cast(prims, lp.position, d);
          if (hit.label == kUnlabeled || hit.t > lp.max_range) continue;
          const double r = hit.t + (lp.noise_std > 0.0 ? lp.noise_std * StandardNormal(rng) : 0.0);
          if (r <= 0.0) continue;
          f.cloud.points.push_back(lp.position + r * d);
          f.point_truth.push_back(hit.label);
        }
      }
    }
  });

  const VocabularySet merged = MergedFrameVocab(scene);
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    SyntheticFrame& f = scene.frames[k];
    f.vocab = cfg.vocab_scope == VocabMode::kConsecutive ? merged : f.frame_vocab;
    f.maps = Segment(scene, static_cast<int>(k), f.vocab);
  }
  return scene;
}

RayHit CastRay(const SyntheticScene& scene, int frame, const Eigen::Vector3d& origin,
               const Eigen::Vector3d& direction) {
  if (frame < 0 || frame >= static_cast<int>(scene.frames.size())) {
    throw ValidationError("frame " + std::to_string(frame) + " out of range");
  }
  return Cast(PosePrimitives(scene.config, scene.labels, frame), origin, direction);
}

SequenceInput MakeSequence(const SyntheticScene& scene, VocabMode mode) {
  SequenceInput input;
  input.rig = scene.rig;
  input.poses = scene.poses;
  input.boxes = scene.boxes;
  const VocabularySet merged = MergedFrameVocab(scene);
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    const SyntheticFrame& f = scene.frames[k];
    FrameInput frame;
    frame.cloud = f.cloud;
    if (mode == scene.config.vocab_scope) {
      frame.vocab = f.vocab;
      frame.maps = f.maps;
    } else {
      frame.vocab = mode == VocabMode::kConsecutive ? merged : f.frame_vocab;
      frame.maps = Segment(scene, static_cast<int>(k), frame.vocab);
    }
    input.frames.push_back(std::move(frame));
  }
  return input;
}

ScoredRun RunAndScore(const SyntheticScene& scene, Strategy strategy, VocabMode mode,
                      int workers) {
  PipelineOptions options;
  options.strategy = strategy;
  options.target_frame = scene.target_frame();
  options.grid = scene.config.grid;
  options.workers = workers;
  ScoredRun run;
  run.output = RunPipeline(MakeSequence(scene, mode), options);
  const ClassSet classes = scene.Classes();
  run.prediction = ApplyClassMap(run.output.grid, MapByName(run.output.vocab, classes), classes);
  ScoreOptions score;
  score.mask = std::span<const std::uint8_t>(run.output.observed.occupied);
  run.report = Score(run.prediction, scene.frames[scene.target_frame()].gt, classes, score);
  run.report.tag = std::string(StrategyName(strategy));
  return run;
}

MetricReport RunPipelineAndScore(const SyntheticScene& scene, Strategy strategy, int workers) {
  return RunAndScore(scene, strategy, scene.config.vocab_scope, workers).report;
}

fs::path WriteSyntheticScene(const SyntheticScene& scene, const fs::path& dir) {
  fs::create_directories(dir);
  PipelineConfig cfg;
  cfg.camera_names = scene.camera_names;
  cfg.rig = scene.rig;
  cfg.boxes = scene.boxes;
  cfg.grid = scene.config.grid;
  cfg.vocab_scope = scene.config.vocab_scope;
  cfg.target_frame = scene.target_frame();
  cfg.output_dir = fs::absolute(dir) / "out";
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    const SyntheticFrame& f = scene.frames[k];
    std::ostringstream name;
    name << "frame_" << std::setw(3) << std::setfill('0') << k;
    const fs::path fd = fs::absolute(dir) / name.str();
    FrameEntry e;
    e.index = static_cast<int>(k);
    e.world_from_ego = scene.poses[k].world_from_ego;
    e.cloud = fd / "cloud.lpc";
    e.vocab = fd / "vocab.txt";
    e.embeddings = fd / "embeddings.lem";
    WritePointCloud(e.cloud, f.cloud);
    WriteVocabulary(e.vocab, f.frame_vocab);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(f.frame_vocab.size()),
                         scene.embeddings.dim());
    for (std::size_t i = 0; i < f.frame_vocab.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) =
          scene.embeddings.row(*scene.labels.Find(f.frame_vocab.labels()[i]));
    }
    WriteEmbeddings(*e.embeddings, rows);
    for (std::size_t c = 0; c < f.maps.size(); ++c) {
      e.maps.push_back(fd / ("cam_" + std::to_string(c) + ".lsg"));
      WriteSegmentationMap(e.maps.back(), f.maps[c]);
    }
    WriteVoxelGrid(fd / "gt.lvx", f.gt);
    cfg.frames.push_back(std::move(e));
  }
  EvaluationEntry ev;
  ev.classes = fs::absolute(dir) / "classes.txt";
  ev.ground_truth = cfg.frames[static_cast<std::size_t>(cfg.target_frame)].cloud.parent_path() /
                    "gt.lvx";
  WriteClassSet(ev.classes, scene.Classes());
  cfg.evaluation = ev;
  const fs::path config_path = fs::absolute(dir) / "sequence.json";
  WritePipelineConfig(config_path, cfg);
  return config_path;
}

std::vector<AblationSetting> DefaultAblationSettings() {
  return {{"(b)", VocabMode::kSingleFrame, Strategy::kMajority},
          {"(c)", VocabMode::kConsecutive, Strategy::kMajority},
          {"(d)", VocabMode::kConsecutive, Strategy::kNearest},
          {"(e)", VocabMode::kConsecutive, Strategy::kModelView}};
}

double AblationResult::Mean(std::size_t setting) const {
  const auto& v = miou.at(setting);
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void AblationResult::PrintTable(std::ostream& os) const {
  os << std::left << std::setw(9) << "setting" << std::setw(13) << "vocabulary"
     << std::setw(14) << "voxelization" << std::right << std::setw(10) << "mean_miou"
     << std::setw(10) << "min" << std::setw(10) << "max" << "\n";
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const auto& v = miou[s];
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    os << std::left << std::setw(9) << settings[s].name << std::setw(13)
       << VocabModeName(settings[s].mode) << std::setw(14) << StrategyName(settings[s].strategy)
       << std::right << std::fixed << std::setprecision(4) << std::setw(10) << Mean(s)
       << std::setw(10) << (v.empty() ? 0.0 : *lo) << std::setw(10) << (v.empty() ? 0.0 : *hi)
       << "\n";
  }
  os << std::defaultfloat;
}

AblationResult RunAblation(const SceneConfig& base, int count,
                           std::span<const AblationSetting> settings, int workers) {
  if (count < 1) throw ValidationError("ablation needs at least one seed");
  AblationResult result;
  result.settings.assign(settings.begin(), settings.end());
  result.miou.assign(settings.size(), std::vector<double>(static_cast<std::size_t>(count)));
  for (int i = 0; i < count; ++i) result.seeds.push_back(base.seed + static_cast<std::uint64_t>(i));
  ParallelFor(static_cast<std::size_t>(count), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SceneConfig cfg = base;
      cfg.seed = result.seeds[i];
      const SyntheticScene scene = Generate(cfg, 1);
      for (std::size_t s = 0; s < settings.size(); ++s) {
        result.miou[s][i] =
            RunAndScore(scene, settings[s].strategy, settings[s].mode, 1).report.miou;
      }
    }
  });
  return result;
}

double SignTestPValue(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("sign test needs paired samples");
  int wins = 0;
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++n;
    if (a[i] > b[i]) ++wins;
  }
  if (n == 0) return 1.0;
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                  n * std::log(2.0));
  }
  return std::min(1.0, p);
}

}  // namespace semocc
