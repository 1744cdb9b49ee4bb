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
#ifndef SEMOCC_SEQUENCE_CONFIG_H_
#define SEMOCC_SEQUENCE_CONFIG_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semocc/evaluation.h"
#include "semocc/geometry.h"
#include "semocc/pipeline.h"
#include "semocc/reconstruction.h"
#include "semocc/vocab.h"

namespace semocc {

// Which vocabulary a frame's segmentation was produced against: its own
// (single-frame) or the merged sequence vocabulary (consecutive-frame).
enum class VocabMode { kSingleFrame, kConsecutive };

std::string_view VocabModeName(VocabMode mode);
// Accepts "single" and "consecutive".
VocabMode ParseVocabMode(std::string_view name);

struct FrameEntry {
  int index = 0;
  RigidTransform world_from_ego;
  std::filesystem::path cloud;
  std::vector<std::filesystem::path> maps;  // one per camera, LSG1
  std::filesystem::path vocab;
  std::optional<std::filesystem::path> embeddings;
};

struct EvaluationEntry {
  std::filesystem::path classes;
  std::filesystem::path ground_truth;  // LVX1 with class ids
  std::optional<std::filesystem::path> class_embeddings;
  std::optional<std::filesystem::path> overrides;
};

// One sequence as described by its JSON config. Paths are absolute after
// loading (relative entries resolve against the config's directory).
struct PipelineConfig {
  std::vector<std::string> camera_names;
  std::vector<CameraModel> rig;
  std::vector<FrameEntry> frames;
  std::vector<BoundingBox3D> boxes;
  GridSpec grid;
  Strategy strategy = Strategy::kMajority;
  VocabMode vocab_scope = VocabMode::kConsecutive;
  int target_frame = 0;
  std::optional<int> window;
  std::optional<int> workers;
  std::optional<EvaluationEntry> evaluation;
  std::filesystem::path output_dir;
};

// Parses and checks the config structure. Throws ValidationError with the
// offending key on malformed content.
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);
PipelineConfig ParsePipelineConfig(std::string_view json_text,
                                   const std::filesystem::path& base_dir);
// Writes paths relative to the config's directory where possible.
void WritePipelineConfig(const std::filesystem::path& path,
                         const PipelineConfig& config);

// Checks that every referenced file exists and that its header agrees with the
// config (map sizes vs cameras, vocabulary vs embedding rows, frame indices)
// without reading payloads. Throws ValidationError or FormatError.
void ValidateInputs(const PipelineConfig& config);

// Validates, then reads every artifact. Feature maps are segmented against the
// frame or merged embeddings according to the vocabulary scope; in
// consecutive mode every frame's vocab becomes the merged vocabulary.
SequenceInput LoadSequence(const PipelineConfig& config, int workers = 1);

PipelineOptions MakePipelineOptions(const PipelineConfig& config, int workers);

// Class-space prediction for a pipeline output: maps vocabulary labels to
// evaluation classes by embedding similarity when class embeddings are
// configured, by name otherwise.
VoxelGrid PredictionInClassSpace(const PipelineConfig& config,
                                 const PipelineOutput& output,
                                 const ClassSet& classes);

}  // namespace semocc

#endif  // SEMOCC_SEQUENCE_CONFIG_H_
