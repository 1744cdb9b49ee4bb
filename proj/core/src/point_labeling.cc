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
#include "semocc/point_labeling.h"

#include <string>

#include "semocc/error.h"
#include "semocc/parallel.h"

namespace semocc {

void PointCloud::Validate() const {
  if (labels && labels->size() != points.size()) {
    throw ValidationError("point cloud has " + std::to_string(points.size()) +
                          " points but " + std::to_string(labels->size()) +
                          " labels");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw ValidationError("point " + std::to_string(i) + " is not finite");
    }
  }
}

std::optional<CameraHit> SelectCamera(std::span<const CameraModel> rig,
                                      const Eigen::Vector3d& point_ego) {
  std::optional<CameraHit> best;
  for (std::size_t i = 0; i < rig.size(); ++i) {
    const auto proj = Project(rig[i], point_ego);
    if (!proj || !InsideImage(proj->u, proj->v, rig[i].width, rig[i].height)) {
      continue;
    }
    if (!best || proj->depth < best->projection.depth) {
      best = CameraHit{static_cast<int>(i), *proj};
    }
  }
  return best;
}

PointCloud AssignPointLabels(const PointCloud& cloud,
                             std::span<const CameraModel> rig,
                             std::span<const SegmentationMap> maps,
                             int workers) {
  if (rig.size() != maps.size()) {
    throw ValidationError("rig has " + std::to_string(rig.size()) +
                          " cameras but " + std::to_string(maps.size()) +
                          " segmentation maps were given");
  }
  for (std::size_t i = 0; i < rig.size(); ++i) {
    if (maps[i].width() != rig[i].width || maps[i].height() != rig[i].height) {
      throw ValidationError("segmentation map " + std::to_string(i) + " is " +
                            std::to_string(maps[i].width()) + "x" +
                            std::to_string(maps[i].height()) +
                            " but camera expects " +
                            std::to_string(rig[i].width) + "x" +
                            std::to_string(rig[i].height));
    }
  }
  cloud.Validate();

  PointCloud out;
  out.frame_index = cloud.frame_index;
  out.points = cloud.points;
  std::vector<LabelId> labels(cloud.size(), kUnlabeled);
  ParallelFor(cloud.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (const auto hit = SelectCamera(rig, cloud.points[i])) {
        labels[i] = SampleNearest(maps[hit->camera], hit->projection.u,
                                  hit->projection.v);
      }
    }
  });
  out.labels = std::move(labels);
  return out;
}

}  // namespace semocc
