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
#ifndef SEMOCC_POINT_LABELING_H_
#define SEMOCC_POINT_LABELING_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "semocc/geometry.h"
#include "semocc/label.h"
#include "semocc/pixel_labeling.h"

namespace semocc {

// One LiDAR sweep in its ego frame.
struct PointCloud {
  int frame_index = 0;
  std::vector<Eigen::Vector3d> points;
  std::optional<std::vector<LabelId>> labels;

  std::size_t size() const { return points.size(); }
  // Throws ValidationError on non-finite points or a label/point count mismatch.
  void Validate() const;
};

// Camera chosen for a point by the min-depth rule.
struct CameraHit {
  int camera;
  Projection projection;
};

// Among cameras with depth > 0 and a strictly in-bounds projection, the one
// with the smallest depth; ties go to the smaller camera index.
std::optional<CameraHit> SelectCamera(std::span<const CameraModel> rig,
                                      const Eigen::Vector3d& point_ego);

// Labels every point from the segmentation map of its min-depth camera. Points
// no camera sees get kUnlabeled. Output order equals input order and is
// independent of `workers`. Throws ValidationError if the rig and map counts
// differ or a map's size does not match its camera.
PointCloud AssignPointLabels(const PointCloud& cloud,
                             std::span<const CameraModel> rig,
                             std::span<const SegmentationMap> maps,
                             int workers = 1);

}  // namespace semocc

#endif  // SEMOCC_POINT_LABELING_H_
