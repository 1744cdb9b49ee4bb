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
#ifndef SEMOCC_LABEL_H_
#define SEMOCC_LABEL_H_

#include <cstdint>

namespace semocc {

// Discrete label alphabet shared by segmentation maps, point clouds and voxel
// grids. Values below the sentinels index into a vocabulary.
using LabelId = std::uint16_t;

inline constexpr LabelId kUnlabeled = 0xFFFF;
inline constexpr LabelId kFree = 0xFFFE;
inline constexpr std::size_t kMaxVocabularySize = kFree;

constexpr bool IsSentinel(LabelId id) { return id >= kFree; }

}  // namespace semocc

#endif  // SEMOCC_LABEL_H_
