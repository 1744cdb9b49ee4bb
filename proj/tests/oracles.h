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
// Brute-force reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond its data types.

#ifndef SEMOCC_TESTS_ORACLES_H_
#define SEMOCC_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semocc/evaluation.h"
#include "semocc/geometry.h"
#include "semocc/label.h"
#include "semocc/reconstruction.h"
#include "semocc/synthetic.h"

namespace semocc::oracle {

inline std::optional<std::size_t> VoxelOf(const GridSpec& spec,
                                          const Eigen::Vector3d& p) {
  int c[3];
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - spec.origin()[a]) / spec.voxel_size());
    if (f < 0 || f >= spec.dims()[a]) return std::nullopt;
    c[a] = static_cast<int>(f);
  }
  return (static_cast<std::size_t>(c[0]) * spec.dims()[1] + c[1]) * spec.dims()[2] +
         c[2];
}

inline Eigen::Vector3d VoxelCenter(const GridSpec& spec, std::size_t index) {
  const int z = static_cast<int>(index % spec.dims()[2]);
  const int y = static_cast<int>(index / spec.dims()[2] % spec.dims()[1]);
  const int x = static_cast<int>(index / spec.dims()[2] / spec.dims()[1]);
  return spec.origin() +
         spec.voxel_size() * Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5);
}

// Histogram mode per voxel.
inline VoxelGrid Majority(const SceneAggregate& agg, const GridSpec& spec) {
  std::map<std::size_t, std::map<LabelId, int>> votes;
  for (std::size_t i = 0; i < agg.size(); ++i) {
    const auto v = VoxelOf(spec, agg.points[i]);
    if (!v) continue;
    auto& h = votes[*v];
    if (agg.labels[i] != kUnlabeled) ++h[agg.labels[i]];
    else h.try_emplace(kUnlabeled, 0);
  }
  VoxelGrid out(spec);
  for (const auto& [v, h] : votes) {
    LabelId best = kUnlabeled;
    int best_count = 0;
    for (const auto& [label, count] : h) {
      if (label == kUnlabeled) continue;
      if (count > best_count) {  // map order: ties keep the smaller id
        best = label;
        best_count = count;
      }
    }
    out.labels[v] = best;
  }
  return out;
}

// Full scan over all points for every occupied voxel.
inline VoxelGrid Nearest(const SceneAggregate& agg, const GridSpec& spec) {
  std::vector<std::optional<std::size_t>> voxel(agg.size());
  std::vector<char> occupied(spec.voxel_count(), 0);
  for (std::size_t i = 0; i < agg.size(); ++i) {
    voxel[i] = VoxelOf(spec, agg.points[i]);
    if (voxel[i]) occupied[*voxel[i]] = 1;
  }
  VoxelGrid out(spec);
  for (std::size_t v = 0; v < spec.voxel_count(); ++v) {
    if (!occupied[v]) continue;
    const Eigen::Vector3d c = VoxelCenter(spec, v);
    double best = std::numeric_limits<double>::infinity();
    LabelId label = kUnlabeled;
    for (std::size_t i = 0; i < agg.size(); ++i) {
      if (voxel[i] != v || agg.labels[i] == kUnlabeled) continue;
      const double d = (agg.points[i] - c).norm();
      if (d < best) {
        best = d;
        label = agg.labels[i];
      }
    }
    out.labels[v] = label;
  }
  return out;
}

inline SceneAggregate RandomAggregate(std::mt19937_64& rng, const GridSpec& spec,
                                      std::size_t count, int label_count,
                                      double unlabeled_fraction) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, label_count - 1);
  SceneAggregate agg;
  const Eigen::Vector3d extent =
      spec.voxel_size() *
      Eigen::Vector3d(spec.dims()[0], spec.dims()[1], spec.dims()[2]);
  for (std::size_t i = 0; i < count; ++i) {
    // A margin of 5% on each side puts some points outside the grid.
    Eigen::Vector3d p;
    for (int a = 0; a < 3; ++a) {
      p[a] = spec.origin()[a] + extent[a] * (1.1 * u01(rng) - 0.05);
    }
    agg.points.push_back(p);
    agg.labels.push_back(u01(rng) < unlabeled_fraction
                             ? kUnlabeled
                             : static_cast<LabelId>(label(rng)));
    agg.source_frames.push_back(0);
  }
  return agg;
}

struct Tally {
  std::vector<std::optional<double>> iou;
  std::vector<bool> in_mean;
  double miou = 1.0;
  double occupancy_iou = 1.0;
};

// Full confusion matrix over the class ids, the free sentinel and the
// unlabeled sentinel, then IoU from row and column sums.
inline Tally ConfusionScore(const VoxelGrid& pred, const VoxelGrid& gt,
                            const ClassSet& classes, ClassSubset subset,
                            bool absent_as_zero,
                            const std::vector<std::uint8_t>* mask = nullptr) {
  const std::size_t k = classes.semantic_count();
  auto slot = [k](LabelId l) -> std::size_t {
    if (l == kFree) return k;
    if (l == kUnlabeled) return k + 1;
    return l;
  };
  std::vector<std::vector<std::uint64_t>> m(k + 2,
                                            std::vector<std::uint64_t>(k + 2, 0));
  for (std::size_t v = 0; v < gt.labels.size(); ++v) {
    if (mask && !(*mask)[v]) continue;
    ++m[slot(gt.labels[v])][slot(pred.labels[v])];
  }
  Tally t;
  t.iou.resize(k);
  t.in_mean.assign(k, false);
  double sum = 0.0;
  int n = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k + 2; ++j) {
      row += m[c][j];
      col += m[j][c];
    }
    const std::uint64_t uni = row + col - m[c][c];
    if (uni > 0) t.iou[c] = static_cast<double>(m[c][c]) / static_cast<double>(uni);
    bool selected = true;
    if (subset != ClassSubset::kAll) {
      const bool base = classes.base_mask.at(c);
      selected = subset == ClassSubset::kBase ? base : !base;
    }
    if (!selected) continue;
    if (t.iou[c] || absent_as_zero) {
      t.in_mean[c] = true;
      sum += t.iou[c].value_or(0.0);
      ++n;
    }
  }
  t.miou = n == 0 ? 1.0 : sum / n;
  std::uint64_t both = 0, either = 0;
  for (std::size_t g = 0; g < k + 2; ++g) {
    for (std::size_t p = 0; p < k + 2; ++p) {
      const bool go = g != k, po = p != k;
      if (go && po) both += m[g][p];
      if (go || po) either += m[g][p];
    }
  }
  t.occupancy_iou = either == 0 ? 1.0 : static_cast<double>(both) / either;
  return t;
}

struct OracleView {
  int camera;
  double u;
  double v;
};

// Min-depth camera by direct evaluation of K (R p + t).
inline std::optional<OracleView> PickCamera(std::span<const CameraModel> rig,
                                            const Eigen::Vector3d& p) {
  std::optional<OracleView> best;
  double best_depth = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < rig.size(); ++c) {
    const Eigen::Vector3d q =
        rig[c].cam_from_ego.rotation() * p + rig[c].cam_from_ego.translation();
    if (q.z() <= 0) continue;
    const Eigen::Vector3d h = rig[c].intrinsics * q;
    const double u = h.x() / h.z(), v = h.y() / h.z();
    if (!(u > 0 && u < rig[c].width && v > 0 && v < rig[c].height)) continue;
    if (q.z() < best_depth) {
      best_depth = q.z();
      best = OracleView{static_cast<int>(c), u, v};
    }
  }
  return best;
}

// Slab test against every primitive in world coordinates. Returns the label
// text of the first surface hit, or nullopt for no hit; `t_out` receives the
// hit parameter.
inline std::optional<std::string> CastWorldRay(const SceneConfig& cfg, int frame,
                                               const Eigen::Vector3d& o,
                                               const Eigen::Vector3d& d,
                                               double* t_out = nullptr) {
  constexpr double kEps = 1e-9;
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::string> label;
  for (const Primitive& p : cfg.primitives) {
    double t = std::numeric_limits<double>::infinity();
    if (p.shape == Primitive::Shape::kGround) {
      if (d.z() < 0 && o.z() > p.height) t = (p.height - o.z()) / d.z();
    } else {
      const Eigen::Vector3d c = p.center + frame * p.velocity;
      const Eigen::Matrix3d r =
          Eigen::AngleAxisd(p.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
      const Eigen::Vector3d lo = r.transpose() * (o - c);
      const Eigen::Vector3d ld = r.transpose() * d;
      double t0 = -std::numeric_limits<double>::infinity();
      double t1 = std::numeric_limits<double>::infinity();
      bool miss = false;
      for (int a = 0; a < 3; ++a) {
        const double h = 0.5 * p.size[a];
        if (ld[a] == 0.0) {
          if (std::abs(lo[a]) > h) miss = true;
          continue;
        }
        const double ta = (-h - lo[a]) / ld[a], tb = (h - lo[a]) / ld[a];
        t0 = std::max(t0, std::min(ta, tb));
        t1 = std::min(t1, std::max(ta, tb));
      }
      if (miss || t1 < t0 || t1 <= kEps) continue;
      t = t0 > kEps ? t0 : t1;
    }
    if (t < best) {
      best = t;
      label = p.label;
    }
  }
  if (t_out) *t_out = best;
  return label;
}

// Label of the surface seen through the center of the pixel that the point's
// min-depth camera maps it to. Outer nullopt: no camera sees the point.
inline std::optional<std::optional<std::string>> PixelCenterLabel(
    const SyntheticScene& scene, int frame, const Eigen::Vector3d& p_ego) {
  const auto view = PickCamera(scene.rig, p_ego);
  if (!view) return std::nullopt;
  const CameraModel& cam = scene.rig[view->camera];
  const Eigen::Vector3d pix(std::floor(view->u) + 0.5, std::floor(view->v) + 0.5, 1.0);
  const Eigen::Matrix3d r = cam.cam_from_ego.rotation();
  const Eigen::Vector3d d_ego = r.transpose() * (cam.intrinsics.inverse() * pix);
  const Eigen::Vector3d o_ego = -(r.transpose() * cam.cam_from_ego.translation());
  const RigidTransform& w = scene.poses[frame].world_from_ego;
  return CastWorldRay(scene.config, frame, w.Apply(o_ego), w.ApplyRotation(d_ego));
}

}  // namespace semocc::oracle

#endif  // SEMOCC_TESTS_ORACLES_H_
