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
#include "semocc/pipeline.h"

#include <cstdlib>

#include "semocc/error.h"

namespace semocc {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kMajority:
      return "majority";
    case Strategy::kNearest:
      return "nearest";
    case Strategy::kModelView:
      return "modelview";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "majority") return Strategy::kMajority;
  if (name == "nearest") return Strategy::kNearest;
  if (name == "modelview") return Strategy::kModelView;
  throw ValidationError("unknown voxelization strategy '" + std::string(name) + "'");
}

namespace {

VocabularySet MergedVocab(const SequenceInput& input) {
  std::vector<VocabularySet> vocabs;
  vocabs.reserve(input.frames.size());
  for (const auto& frame : input.frames) vocabs.push_back(frame.vocab);
  return MergeSequenceVocab(vocabs);
}

void RemapInPlace(std::vector<LabelId>& labels, const std::vector<LabelId>& table) {
  for (auto& id : labels) {
    if (IsSentinel(id)) continue;
    if (id >= table.size()) {
      throw ValidationError("label id " + std::to_string(id) +
                            " outside its frame vocabulary");
    }
    id = table[id];
  }
}

const FrameInput& FindFrame(const SequenceInput& input, int frame_index) {
  for (const auto& frame : input.frames) {
    if (frame.cloud.frame_index == frame_index) return frame;
  }
  throw ValidationError("no frame with index " + std::to_string(frame_index));
}

}  // namespace

std::vector<PointCloud> LabelSequence(const SequenceInput& input,
                                      const VocabularySet& merged, int workers) {
  std::vector<PointCloud> labeled;
  labeled.reserve(input.frames.size());
  for (const auto& frame : input.frames) {
    for (const auto& map : frame.maps) map.ValidateIds(frame.vocab.size());
    PointCloud cloud = AssignPointLabels(frame.cloud, input.rig, frame.maps, workers);
    RemapInPlace(*cloud.labels, RemapTable(frame.vocab, merged));
    labeled.push_back(std::move(cloud));
  }
  return labeled;
}

PipelineOutput RunPipeline(const SequenceInput& input,
                           const PipelineOptions& options) {
  if (input.frames.empty()) throw ValidationError("sequence has no frames");
  if (options.window && *options.window < 0) {
    throw ValidationError("aggregation window must be non-negative");
  }
  const FrameInput& target = FindFrame(input, options.target_frame);

  PipelineOutput out;
  out.vocab = MergedVocab(input);
  std::vector<PointCloud> labeled = LabelSequence(input, out.vocab, options.workers);

  std::vector<PointCloud> window;
  for (const auto& cloud : labeled) {
    if (!options.window ||
        std::abs(cloud.frame_index - options.target_frame) <= *options.window) {
      window.push_back(cloud);
    }
  }
  out.labeled = std::move(labeled);
  out.aggregate = Aggregate(window, input.poses, input.boxes,
                            options.target_frame, options.workers);

  VoxelGrid majority = VoxelizeMajority(out.aggregate, options.grid, options.workers);
  out.observed = BinaryOccupancy(majority);
  switch (options.strategy) {
    case Strategy::kMajority:
      out.grid = std::move(majority);
      break;
    case Strategy::kNearest:
      out.grid = VoxelizeNearest(out.aggregate, options.grid, options.workers);
      break;
    case Strategy::kModelView: {
      out.grid = VoxelModelviewLabels(out.observed, input.rig, target.maps,
                                      options.workers);
      RemapInPlace(out.grid.labels, RemapTable(target.vocab, out.vocab));
      break;
    }
  }
  return out;
}

}  // namespace semocc
