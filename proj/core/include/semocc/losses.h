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
#ifndef SEMOCC_LOSSES_H_
#define SEMOCC_LOSSES_H_

#include <cstddef>

#include <Eigen/Core>

#include "semocc/reconstruction.h"
#include "semocc/vocab.h"

namespace semocc {

// Network outputs over a voxel grid: a (free, occupied) logit pair and a
// language vector per voxel, rows in linear voxel order.
struct PredictionVolume {
  PredictionVolume() = default;
  PredictionVolume(GridSpec s, Eigen::Index language_dim)
      : spec(std::move(s)),
        geometry(Eigen::MatrixX2d::Zero(spec.voxel_count(), 2)),
        language(Eigen::MatrixXd::Zero(spec.voxel_count(), language_dim)) {}

  GridSpec spec;
  Eigen::MatrixX2d geometry;  // column 0: free logit, column 1: occupied
  Eigen::MatrixXd language;

  void Validate() const;
};

// Voxel labels plus the (compressed) embedding of every label they use.
struct LanguageTarget {
  VoxelGrid grid;
  EmbeddingMatrix target_embeddings;
};

// Mean over all voxels of two-class softmax cross-entropy.
double GeometryLoss(const PredictionVolume& pred, const OccupancyGrid& gt);
// d GeometryLoss / d logits, same shape as pred.geometry.
Eigen::MatrixX2d GeometryLossGradient(const PredictionVolume& pred,
                                      const OccupancyGrid& gt);

struct LanguageLoss {
  double sum = 0.0;
  std::size_t count = 0;  // occupied, labeled voxels
  double mean() const { return count == 0 ? 0.0 : sum / count; }
};

// Sum of 1 - cos(target, prediction) over voxels that carry a real label.
// Free and unlabeled voxels are skipped. A zero prediction at a counted voxel
// throws ProcessingError.
LanguageLoss ComputeLanguageLoss(const PredictionVolume& pred,
                                 const LanguageTarget& target);
// d LanguageLoss.sum / d pred.language.
Eigen::MatrixXd LanguageLossGradient(const PredictionVolume& pred,
                                     const LanguageTarget& target);

// Unit-weight sum of the geometry mean and the language sum.
double TotalLoss(const PredictionVolume& pred, const OccupancyGrid& gt,
                 const LanguageTarget& target);

}  // namespace semocc

#endif  // SEMOCC_LOSSES_H_
