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
#ifndef SEMOCC_RECONSTRUCTION_H_
#define SEMOCC_RECONSTRUCTION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semocc/geometry.h"
#include "semocc/label.h"
#include "semocc/pixel_labeling.h"
#include "semocc/point_labeling.h"

namespace semocc {

// Regular voxel lattice in the target frame's ego coordinates. Voxel (x, y, z)
// covers the half-open box origin + [x, x+1) * voxel_size etc. Linear indices
// are X-major, Z-minor: (x * Y + y) * Z + z.
class GridSpec {
 public:
  // The occupancy benchmark volume: 200 x 200 x 16 voxels of 0.4 m spanning
  // [-40, 40] x [-40, 40] x [-1, 5.4] m.
  GridSpec();
  // Throws ValidationError on a non-positive voxel size or dimension.
  GridSpec(const Eigen::Vector3d& origin, double voxel_size,
           std::array<int, 3> dims);

  const Eigen::Vector3d& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  Eigen::Vector3d max_corner() const;

  std::size_t Linear(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * dims_[1] + y) * dims_[2] + z;
  }
  std::array<int, 3> Coords(std::size_t index) const;
  Eigen::Vector3d Center(std::size_t index) const;
  // Voxel containing p, or absent for points outside the volume.
  std::optional<std::size_t> Index(const Eigen::Vector3d& p) const;

  // Equality at the 32-bit precision the grid file format stores.
  bool SameLattice(const GridSpec& other) const;

 private:
  Eigen::Vector3d origin_;
  double voxel_size_;
  std::array<int, 3> dims_;
};

// Oriented 3D box in the ego frame of `frame_index`; yaw about +z.
struct BoundingBox3D {
  std::string track_id;
  int frame_index = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();  // length, width, height
  double yaw = 0.0;
  bool is_moving = false;

  RigidTransform EgoFromBox() const {
    return RigidTransform::FromYaw(yaw, center);
  }
  // Closed containment test in box-local coordinates.
  bool Contains(const Eigen::Vector3d& point_ego) const;
  void Validate() const;
};

// Label per voxel; kFree where no point landed.
struct VoxelGrid {
  VoxelGrid() = default;
  explicit VoxelGrid(GridSpec s, LabelId fill = kFree)
      : spec(std::move(s)), labels(spec.voxel_count(), fill) {}

  GridSpec spec;
  std::vector<LabelId> labels;

  friend bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
    return a.spec.SameLattice(b.spec) && a.labels == b.labels;
  }
};

struct OccupancyGrid {
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridSpec s)
      : spec(std::move(s)), occupied(spec.voxel_count(), 0) {}

  GridSpec spec;
  std::vector<std::uint8_t> occupied;  // 0 = free, 1 = occupied

  std::size_t count() const;
};

// Labeled points from many frames expressed in the target frame's ego
// coordinates.
struct SceneAggregate {
  int target_frame = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<LabelId> labels;
  std::vector<int> source_frames;

  std::size_t size() const { return points.size(); }
};

// Merges labeled clouds into the target frame. Static points go
// ego_k -> world -> ego_target. Points inside a moving box of track t in frame
// k are re-posed through t's box-local coordinates onto t's target-frame box;
// tracks without a target-frame box only contribute from the target frame
// itself. Overlapping moving boxes resolve to the nearest box center. Output
// is ordered by frame index, then point index. Throws ValidationError if a
// frame (or the target frame) has no pose or a cloud is unlabeled.
SceneAggregate Aggregate(std::span<const PointCloud> clouds,
                         std::span<const EgoPose> poses,
                         std::span<const BoundingBox3D> boxes, int target_frame,
                         int workers = 1);

// Per voxel, the most frequent label among labeled points (ties -> smallest
// id). Voxels holding only unlabeled points become kUnlabeled; empty voxels
// kFree. Points outside the grid are discarded.
VoxelGrid VoxelizeMajority(const SceneAggregate& agg, const GridSpec& spec,
                           int workers = 1);

// Per voxel, the label of the labeled point nearest the voxel center (ties ->
// earliest point in aggregate order); kUnlabeled if the voxel has points but
// none is labeled.
VoxelGrid VoxelizeNearest(const SceneAggregate& agg, const GridSpec& spec,
                          int workers = 1);

// Projects each occupied voxel center like a LiDAR point (min-depth camera,
// no inter-voxel occlusion) and samples the map. Occupied voxels outside every
// camera get kUnlabeled.
VoxelGrid VoxelModelviewLabels(const OccupancyGrid& occupied,
                               std::span<const CameraModel> rig,
                               std::span<const SegmentationMap> maps,
                               int workers = 1);

// kFree -> free, anything else (kUnlabeled included) -> occupied.
OccupancyGrid BinaryOccupancy(const VoxelGrid& grid);

}  // namespace semocc

#endif  // SEMOCC_RECONSTRUCTION_H_
