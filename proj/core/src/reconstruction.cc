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
#include "semocc/reconstruction.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>

#include "semocc/error.h"
#include "semocc/parallel.h"

namespace semocc {

GridSpec::GridSpec() : GridSpec(Eigen::Vector3d(-40.0, -40.0, -1.0), 0.4,
                                {200, 200, 16}) {}

GridSpec::GridSpec(const Eigen::Vector3d& origin, double voxel_size,
                   std::array<int, 3> dims)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims) {
  if (!origin.allFinite()) throw ValidationError("grid origin is not finite");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw ValidationError("voxel size must be positive");
  }
  for (int d : dims) {
    if (d <= 0) throw ValidationError("grid dimensions must be positive");
  }
}

Eigen::Vector3d GridSpec::max_corner() const {
  return origin_ + voxel_size_ * Eigen::Vector3d(dims_[0], dims_[1], dims_[2]);
}

std::array<int, 3> GridSpec::Coords(std::size_t index) const {
  const int z = static_cast<int>(index % dims_[2]);
  index /= dims_[2];
  const int y = static_cast<int>(index % dims_[1]);
  const int x = static_cast<int>(index / dims_[1]);
  return {x, y, z};
}

Eigen::Vector3d GridSpec::Center(std::size_t index) const {
  const auto c = Coords(index);
  return origin_ +
         voxel_size_ * Eigen::Vector3d(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

std::optional<std::size_t> GridSpec::Index(const Eigen::Vector3d& p) const {
  std::array<int, 3> c;
  for (int axis = 0; axis < 3; ++axis) {
    const double f = std::floor((p[axis] - origin_[axis]) / voxel_size_);
    if (!(f >= 0.0) || f >= dims_[axis]) return std::nullopt;
    c[axis] = static_cast<int>(f);
  }
  return Linear(c[0], c[1], c[2]);
}

bool GridSpec::SameLattice(const GridSpec& other) const {
  auto f = [](double v) { return static_cast<float>(v); };
  return dims_ == other.dims_ && f(voxel_size_) == f(other.voxel_size_) &&
         f(origin_.x()) == f(other.origin_.x()) &&
         f(origin_.y()) == f(other.origin_.y()) &&
         f(origin_.z()) == f(other.origin_.z());
}

bool BoundingBox3D::Contains(const Eigen::Vector3d& point_ego) const {
  const Eigen::Vector3d local = Invert(EgoFromBox()).Apply(point_ego);
  return (local.cwiseAbs().array() <= 0.5 * size.array()).all();
}

void BoundingBox3D::Validate() const {
  if (!(size.array() > 0.0).all()) {
    throw ValidationError("box '" + track_id + "' has a non-positive size");
  }
  if (!center.allFinite() || !std::isfinite(yaw)) {
    throw ValidationError("box '" + track_id + "' is not finite");
  }
}

std::size_t OccupancyGrid::count() const {
  return static_cast<std::size_t>(
      std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

SceneAggregate Aggregate(std::span<const PointCloud> clouds,
                         std::span<const EgoPose> poses,
                         std::span<const BoundingBox3D> boxes, int target_frame,
                         int workers) {
  std::map<int, const EgoPose*> pose_of;
  for (const auto& pose : poses) pose_of[pose.frame_index] = &pose;
  auto find_pose = [&](int frame) -> const EgoPose& {
    auto it = pose_of.find(frame);
    if (it == pose_of.end()) {
      throw ValidationError("missing ego pose for frame " + std::to_string(frame));
    }
    return *it->second;
  };
  const RigidTransform target_from_world =
      Invert(find_pose(target_frame).world_from_ego);

  std::map<int, std::vector<const BoundingBox3D*>> moving_in_frame;
  std::unordered_map<std::string, const BoundingBox3D*> at_target;
  for (const auto& box : boxes) {
    box.Validate();
    if (!box.is_moving) continue;
    moving_in_frame[box.frame_index].push_back(&box);
    if (box.frame_index == target_frame) at_target.emplace(box.track_id, &box);
  }

  std::vector<const PointCloud*> ordered;
  for (const auto& cloud : clouds) {
    cloud.Validate();
    if (!cloud.labels) {
      throw ValidationError("cloud of frame " +
                            std::to_string(cloud.frame_index) + " is unlabeled");
    }
    find_pose(cloud.frame_index);
    ordered.push_back(&cloud);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const PointCloud* a, const PointCloud* b) {
                     return a->frame_index < b->frame_index;
                   });

  std::vector<SceneAggregate> parts(ordered.size());
  ParallelFor(ordered.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const PointCloud& cloud = *ordered[c];
      const int frame = cloud.frame_index;
      const RigidTransform target_from_ego =
          Compose(target_from_world, find_pose(frame).world_from_ego);
      static const std::vector<const BoundingBox3D*> kNoBoxes;
      auto it = moving_in_frame.find(frame);
      const auto& frame_boxes = it == moving_in_frame.end() ? kNoBoxes : it->second;

      // Box-local re-posing per moving box of this frame; absent when the
      // track has no target-frame instance.
      std::vector<std::optional<RigidTransform>> repose(frame_boxes.size());
      for (std::size_t b = 0; b < frame_boxes.size(); ++b) {
        auto tgt = at_target.find(frame_boxes[b]->track_id);
        if (tgt != at_target.end()) {
          repose[b] = Compose(tgt->second->EgoFromBox(),
                              Invert(frame_boxes[b]->EgoFromBox()));
        } else if (frame == target_frame) {
          repose[b] = RigidTransform::Identity();
        }
      }

      SceneAggregate& out = parts[c];
      out.points.reserve(cloud.size());
      out.labels.reserve(cloud.size());
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Eigen::Vector3d& p = cloud.points[i];
        int owner = -1;
        double owner_dist = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < frame_boxes.size(); ++b) {
          if (!frame_boxes[b]->Contains(p)) continue;
          const double d = (p - frame_boxes[b]->center).squaredNorm();
          if (d < owner_dist) {
            owner = static_cast<int>(b);
            owner_dist = d;
          }
        }
        Eigen::Vector3d q;
        if (owner < 0) {
          q = target_from_ego.Apply(p);
        } else if (repose[owner]) {
          q = repose[owner]->Apply(p);
        } else {
          continue;
        }
        out.points.push_back(q);
        out.labels.push_back((*cloud.labels)[i]);
        out.source_frames.push_back(frame);
      }
    }
  });

  SceneAggregate agg;
  agg.target_frame = target_frame;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  agg.points.reserve(total);
  agg.labels.reserve(total);
  agg.source_frames.reserve(total);
  for (auto& part : parts) {
    agg.points.insert(agg.points.end(), part.points.begin(), part.points.end());
    agg.labels.insert(agg.labels.end(), part.labels.begin(), part.labels.end());
    agg.source_frames.insert(agg.source_frames.end(), part.source_frames.begin(),
                             part.source_frames.end());
  }
  return agg;
}

namespace {

// Splits per-point records into contiguous voxel slabs, one per worker, so
// each slab can be reduced independently. The reduction of a voxel only sees
// the multiset of its records, so results do not depend on the slab count.
template <typename Record>
std::vector<std::vector<Record>> PartitionBySlab(std::vector<Record> records,
                                                 std::size_t voxel_count,
                                                 int workers) {
  const std::size_t parts = static_cast<std::size_t>(std::max(1, workers));
  const std::size_t slab = (voxel_count + parts - 1) / parts;
  std::vector<std::vector<Record>> buckets(parts);
  for (const auto& r : records) buckets[r.voxel / slab].push_back(r);
  return buckets;
}

struct VoteRecord {
  std::uint64_t voxel;
  LabelId label;
  auto operator<=>(const VoteRecord&) const = default;
};

struct DistanceRecord {
  std::uint64_t voxel;
  std::uint8_t unlabeled;  // labeled points sort first
  double dist2;
  std::uint64_t point;
  LabelId label;
  auto Key() const { return std::tie(voxel, unlabeled, dist2, point); }
};

void CheckAggregate(const SceneAggregate& agg) {
  if (agg.labels.size() != agg.points.size()) {
    throw ValidationError("aggregate label count does not match point count");
  }
}

}  // namespace

VoxelGrid VoxelizeMajority(const SceneAggregate& agg, const GridSpec& spec,
                           int workers) {
  CheckAggregate(agg);
  std::vector<std::optional<std::size_t>> voxel_of(agg.size());
  ParallelFor(agg.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) voxel_of[i] = spec.Index(agg.points[i]);
  });
  std::vector<VoteRecord> records;
  records.reserve(agg.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    if (voxel_of[i]) records.push_back({*voxel_of[i], agg.labels[i]});
  }
  auto buckets = PartitionBySlab(std::move(records), spec.voxel_count(), workers);

  VoxelGrid grid(spec);
  ParallelFor(buckets.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      auto& bucket = buckets[b];
      std::sort(bucket.begin(), bucket.end());
      for (std::size_t i = 0; i < bucket.size();) {
        const std::uint64_t voxel = bucket[i].voxel;
        LabelId best = kUnlabeled;
        std::size_t best_count = 0;
        while (i < bucket.size() && bucket[i].voxel == voxel) {
          const LabelId label = bucket[i].label;
          std::size_t run = 0;
          while (i < bucket.size() && bucket[i].voxel == voxel &&
                 bucket[i].label == label) {
            ++run;
            ++i;
          }
          // Ascending label order makes strict '>' pick the smallest id on ties.
          if (!IsSentinel(label) && run > best_count) {
            best = label;
            best_count = run;
          }
        }
        grid.labels[voxel] = best;
      }
    }
  });
  return grid;
}

VoxelGrid VoxelizeNearest(const SceneAggregate& agg, const GridSpec& spec,
                          int workers) {
  CheckAggregate(agg);
  std::vector<std::optional<DistanceRecord>> per_point(agg.size());
  ParallelFor(agg.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto voxel = spec.Index(agg.points[i]);
      if (!voxel) continue;
      const LabelId label = agg.labels[i];
      per_point[i] = DistanceRecord{
          *voxel, static_cast<std::uint8_t>(IsSentinel(label) ? 1 : 0),
          (agg.points[i] - spec.Center(*voxel)).squaredNorm(), i, label};
    }
  });
  std::vector<DistanceRecord> records;
  records.reserve(agg.size());
  for (const auto& r : per_point) {
    if (r) records.push_back(*r);
  }
  auto buckets = PartitionBySlab(std::move(records), spec.voxel_count(), workers);

  VoxelGrid grid(spec);
  ParallelFor(buckets.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      auto& bucket = buckets[b];
      std::sort(bucket.begin(), bucket.end(),
                [](const DistanceRecord& x, const DistanceRecord& y) {
                  return x.Key() < y.Key();
                });
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        if (i > 0 && bucket[i - 1].voxel == bucket[i].voxel) continue;
        grid.labels[bucket[i].voxel] =
            bucket[i].unlabeled ? kUnlabeled : bucket[i].label;
      }
    }
  });
  return grid;
}

VoxelGrid VoxelModelviewLabels(const OccupancyGrid& occupied,
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
      throw ValidationError("segmentation map " + std::to_string(i) +
                            " does not match its camera size");
    }
  }
  if (occupied.occupied.size() != occupied.spec.voxel_count()) {
    throw ValidationError("occupancy grid size does not match its spec");
  }
  VoxelGrid grid(occupied.spec);
  ParallelFor(grid.labels.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      if (!occupied.occupied[v]) continue;
      const auto hit = SelectCamera(rig, occupied.spec.Center(v));
      grid.labels[v] = hit ? SampleNearest(maps[hit->camera], hit->projection.u,
                                           hit->projection.v)
                           : kUnlabeled;
    }
  });
  return grid;
}

OccupancyGrid BinaryOccupancy(const VoxelGrid& grid) {
  OccupancyGrid out(grid.spec);
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    out.occupied[i] = grid.labels[i] == kFree ? 0 : 1;
  }
  return out;
}

}  // namespace semocc
