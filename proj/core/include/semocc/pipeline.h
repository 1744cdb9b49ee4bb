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
#ifndef SEMOCC_PIPELINE_H_
#define SEMOCC_PIPELINE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semocc/geometry.h"
#include "semocc/pixel_labeling.h"
#include "semocc/point_labeling.h"
#include "semocc/reconstruction.h"
#include "semocc/vocab.h"

namespace semocc {

enum class Strategy { kMajority, kNearest, kModelView };

std::string_view StrategyName(Strategy s);
// Accepts "majority", "nearest", "modelview". Throws ValidationError otherwise.
Strategy ParseStrategy(std::string_view name);

// One frame of ingested data. `maps` hold one map per rig camera with ids
// into `vocab` (the frame's own vocabulary for single-frame runs, the merged
// sequence vocabulary for consecutive-frame runs).
struct FrameInput {
  PointCloud cloud;
  std::vector<SegmentationMap> maps;
  VocabularySet vocab;
};

struct SequenceInput {
  std::vector<CameraModel> rig;
  std::vector<EgoPose> poses;
  std::vector<BoundingBox3D> boxes;
  std::vector<FrameInput> frames;
};

struct PipelineOptions {
  Strategy strategy = Strategy::kMajority;
  int target_frame = 0;
  // Frames with |k - target| <= window are merged; absent merges all.
  std::optional<int> window;
  GridSpec grid;
  int workers = 1;
};

struct PipelineOutput {
  VocabularySet vocab;                 // merged sequence vocabulary
  std::vector<PointCloud> labeled;     // ids in `vocab`
  SceneAggregate aggregate;
  VoxelGrid grid;                      // ids in `vocab`
  OccupancyGrid observed;              // voxels holding >= 1 aggregated point
};

// Label transfer per frame, id remapping into the merged vocabulary, scene
// aggregation into the target frame, then the selected voxelization. The
// model-view strategy labels the aggregate's occupied voxels from the target
// frame's maps.
PipelineOutput RunPipeline(const SequenceInput& input,
                           const PipelineOptions& options);

// Label transfer only: one labeled cloud per frame, ids remapped into the
// merged vocabulary.
std::vector<PointCloud> LabelSequence(const SequenceInput& input,
                                      const VocabularySet& merged, int workers);

}  // namespace semocc

#endif  // SEMOCC_PIPELINE_H_
