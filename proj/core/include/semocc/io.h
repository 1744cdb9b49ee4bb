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
#ifndef SEMOCC_IO_H_
#define SEMOCC_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "semocc/autoencoder.h"
#include "semocc/evaluation.h"
#include "semocc/pixel_labeling.h"
#include "semocc/point_labeling.h"
#include "semocc/reconstruction.h"
#include "semocc/vocab.h"

// Binary artifacts are little-endian.
//
//   point cloud   "LPC1" u32 version=1, u32 frame_index, u64 count,
//                 u32 flags (bit 0: labels), count x (f32 x, y, z [, u16 label])
//   map           "LSG1" u32 H, u32 W, u32 channels, H*W cells row-major:
//                 u16 labels when channels == 1, channels x f32 otherwise
//   embeddings    "LEM1" u32 N, u32 D, N*D f32 row-major; label strings live
//                 in a sidecar text file, one per line, line number = id
//   voxel grid    "LVX1" 3 x f32 origin, f32 voxel size, 3 x u32 dims,
//                 X*Y*Z u16 labels, X-major / Z-minor
//   autoencoder   "LAE1" u32 layer count, per layer u32 rows, u32 cols,
//                 u32 activation; then per layer f32 weights (row-major)
//                 followed by f32 biases. The encoder ends at the first layer
//                 whose output width is the narrowest.
//
// Readers throw FormatError naming the path and byte offset.

namespace semocc {

inline constexpr std::uint32_t kPointCloudVersion = 1;

void WritePointCloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud ReadPointCloud(const std::filesystem::path& path);

struct MapHeader {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
};
MapHeader ReadMapHeader(const std::filesystem::path& path);
void WriteSegmentationMap(const std::filesystem::path& path,
                          const SegmentationMap& map);
SegmentationMap ReadSegmentationMap(const std::filesystem::path& path);
void WriteFeatureMap(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap ReadFeatureMap(const std::filesystem::path& path);

void WriteEmbeddings(const std::filesystem::path& path, const Eigen::MatrixXd& rows);
// Raw rows; use EmbeddingMatrix(rows) to enforce non-zero norms.
Eigen::MatrixXd ReadEmbeddings(const std::filesystem::path& path);

void WriteVocabulary(const std::filesystem::path& path, const VocabularySet& vocab);
VocabularySet ReadVocabulary(const std::filesystem::path& path,
                             VocabScope scope = VocabScope::kPerFrame);

void WriteVoxelGrid(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid ReadVoxelGrid(const std::filesystem::path& path);

void WriteCheckpoint(const std::filesystem::path& path,
                     const AutoencoderParams& params);
AutoencoderParams ReadCheckpoint(const std::filesystem::path& path);

// One class per line; "name<TAB>base" marks a base class. The free class is
// implicit.
ClassSet ReadClassSet(const std::filesystem::path& path);
void WriteClassSet(const std::filesystem::path& path, const ClassSet& classes);

// "vocabulary label<TAB>class name" per line; '#' starts a comment.
std::map<std::string, std::string> ReadClassOverrides(
    const std::filesystem::path& path);

// Whole-file helpers.
std::vector<char> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const std::vector<char>& bytes);

}  // namespace semocc

#endif  // SEMOCC_IO_H_
