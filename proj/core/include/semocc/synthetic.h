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
#ifndef SEMOCC_SYNTHETIC_H_
#define SEMOCC_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semocc/evaluation.h"
#include "semocc/geometry.h"
#include "semocc/pipeline.h"
#include "semocc/reconstruction.h"
#include "semocc/sequence_config.h"
#include "semocc/vocab.h"

namespace semocc {

// Scene element in world coordinates at frame 0. Boxes are oriented by yaw
// and move by `velocity` meters per frame. A ground primitive is the
// half-space z <= height.
struct Primitive {
  enum class Shape { kBox, kGround };
  Shape shape = Shape::kBox;
  std::string label;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double height = 0.0;  // ground only
};

// Pinhole camera mounted at `position` (ego frame), looking along yaw/pitch.
struct SyntheticCamera {
  std::string name;
  int width = 320;
  int height = 200;
  double fx = 200.0;
  double fy = 200.0;
  std::optional<double> cx;  // default width / 2
  std::optional<double> cy;  // default height / 2
  double yaw = 0.0;
  double pitch = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();

  CameraModel Model() const;
};

// Spinning-LiDAR pattern: `rings` elevations evenly spaced in
// [elevation_min, elevation_max] times `azimuth_steps` azimuths evenly spaced
// in [azimuth_min, azimuth_max]. Range noise is Gaussian along the ray.
struct LidarPattern {
  int rings = 32;
  double elevation_min = -0.7;
  double elevation_max = 0.2;
  int azimuth_steps = 720;
  double azimuth_min = -3.14159265358979;
  double azimuth_max = 3.14159265358979;
  double max_range = 50.0;
  double noise_std = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();

  int rays() const { return rings * azimuth_steps; }
};

struct SceneConfig {
  std::uint64_t seed = 0;
  GridSpec grid;
  std::vector<Primitive> primitives;
  std::vector<SyntheticCamera> cameras;
  int frames = 1;
  std::optional<int> target_frame;  // default frames / 2
  Eigen::Vector3d ego_start = Eigen::Vector3d::Zero();
  Eigen::Vector3d ego_velocity = Eigen::Vector3d::Zero();
  double ego_yaw = 0.0;
  LidarPattern lidar;
  double label_noise = 0.0;  // segmentation flip probability in [0, 0.5)
  double box_margin = 0.2;   // emitted boxes are inflated by this per side
  int embedding_dim = 16;
  double vocab_keep = 1.0;  // fraction of visible labels kept per frame
  VocabMode vocab_scope = VocabMode::kConsecutive;
  int layout_jitter_voxels = 0;  // per-seed integer voxel shift of boxes in x/y

  int TargetFrame() const { return target_frame.value_or(frames / 2); }
  // Throws ValidationError on an inconsistent configuration, including boxes
  // that leave the grid in any frame.
  void Validate() const;
};

SceneConfig ParseSceneConfig(std::string_view json_text);
SceneConfig LoadSceneConfig(const std::filesystem::path& path);

struct SyntheticFrame {
  VoxelGrid gt;                        // ids in SyntheticScene::labels
  std::vector<SegmentationMap> truth;  // noiseless ray-cast labels, same ids
  std::vector<SegmentationMap> maps;   // emitted maps, ids in `vocab`
  PointCloud cloud;                    // unlabeled LiDAR returns
  std::vector<LabelId> point_truth;    // label of the surface each return hit
  VocabularySet frame_vocab;           // visible labels after subsampling
  VocabularySet vocab;                 // vocabulary `maps` refer to
};

struct SyntheticScene {
  SceneConfig config;  // after layout jitter
  VocabularySet labels;  // distinct primitive labels; doubles as class names
  EmbeddingMatrix embeddings;
  std::vector<std::string> camera_names;
  std::vector<CameraModel> rig;
  std::vector<EgoPose> poses;
  std::vector<BoundingBox3D> boxes;
  std::vector<SyntheticFrame> frames;

  ClassSet Classes() const;
  int target_frame() const { return config.TargetFrame(); }
};

// Deterministic in cfg.seed and independent of `workers`. Throws
// ValidationError for an invalid config or a degenerate camera.
SyntheticScene Generate(const SceneConfig& cfg, int workers = 1);

struct RayHit {
  LabelId label = kUnlabeled;
  double t = 0.0;
};
// First primitive hit along origin + t * direction (t > 0), ties to the
// earliest primitive. Origin and direction are in the ego coordinates of
// `frame`.
RayHit CastRay(const SyntheticScene& scene, int frame, const Eigen::Vector3d& origin,
               const Eigen::Vector3d& direction);

// Pipeline input whose segmentation is produced against the frame or merged
// vocabulary. Noise draws are shared between modes for a given scene.
SequenceInput MakeSequence(const SyntheticScene& scene, VocabMode mode);

struct ScoredRun {
  PipelineOutput output;
  VoxelGrid prediction;  // class space
  MetricReport report;   // over LiDAR-observed voxels
};

ScoredRun RunAndScore(const SyntheticScene& scene, Strategy strategy, VocabMode mode,
                      int workers = 1);

MetricReport RunPipelineAndScore(const SyntheticScene& scene, Strategy strategy,
                                 int workers = 1);

// Writes clouds, maps, vocabularies, embeddings and ground truth under `dir`
// plus a sequence config; returns the config path.
std::filesystem::path WriteSyntheticScene(const SyntheticScene& scene,
                                          const std::filesystem::path& dir);

struct AblationSetting {
  std::string name;
  VocabMode mode;
  Strategy strategy;
};
// (b) single-frame + majority, (c) consecutive + majority, (d) consecutive +
// nearest, (e) consecutive + model-view.
std::vector<AblationSetting> DefaultAblationSettings();

struct AblationResult {
  std::vector<AblationSetting> settings;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> miou;  // [setting][seed]

  double Mean(std::size_t setting) const;
  void PrintTable(std::ostream& os) const;
};

// Runs every setting on scenes generated with seeds base.seed .. base.seed +
// count - 1.
AblationResult RunAblation(const SceneConfig& base, int count,
                           std::span<const AblationSetting> settings, int workers = 1);

// One-sided sign test p-value for "a > b": ties are dropped and the p-value is
// P(X >= wins) for X ~ Binomial(n, 1/2); 1 when every pair ties.
double SignTestPValue(std::span<const double> a, std::span<const double> b);

}  // namespace semocc

#endif  // SEMOCC_SYNTHETIC_H_
