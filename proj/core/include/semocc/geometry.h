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
#ifndef SEMOCC_GEOMETRY_H_
#define SEMOCC_GEOMETRY_H_

#include <optional>

#include <Eigen/Core>

namespace semocc {

// Proper rigid motion p -> R p + t. Rotation is kept as a matrix because the
// ingestion formats carry 3x3 / 4x4 matrices.
class RigidTransform {
 public:
  static constexpr double kOrthonormalTolerance = 1e-6;

  RigidTransform();  // identity

  // Throws ValidationError unless rotation is orthonormal with det +1 (within
  // kOrthonormalTolerance) and all entries are finite.
  RigidTransform(const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform Identity() { return RigidTransform(); }
  static RigidTransform Translation(const Eigen::Vector3d& t);
  // Rotation about +z by yaw radians, followed by translation t.
  static RigidTransform FromYaw(double yaw, const Eigen::Vector3d& t);
  // Row-major homogeneous 4x4; the last row must be (0, 0, 0, 1).
  static RigidTransform FromMatrix4(const Eigen::Matrix4d& m);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Matrix4d Matrix4() const;

  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  Eigen::Vector3d ApplyRotation(const Eigen::Vector3d& v) const {
    return rotation_ * v;
  }

 private:
  struct Unchecked {};
  RigidTransform(Unchecked, const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  friend RigidTransform Compose(const RigidTransform&, const RigidTransform&);
  friend RigidTransform Invert(const RigidTransform&);

  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// (a o b)(p) = a(b(p)).
RigidTransform Compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform Invert(const RigidTransform& t);

// Max absolute deviation of R^T R from identity, plus |det R - 1|.
double OrthonormalityError(const Eigen::Matrix3d& rotation);

// Ideal pinhole camera rigidly mounted on the ego vehicle.
struct CameraModel {
  // Throws ValidationError if K is not upper triangular with K(2,2) = 1 and
  // positive focal entries, or if width/height are not positive.
  CameraModel(const Eigen::Matrix3d& intrinsics, RigidTransform cam_from_ego,
              int width, int height);

  Eigen::Matrix3d intrinsics;
  RigidTransform cam_from_ego;
  int width;
  int height;
};

struct EgoPose {
  RigidTransform world_from_ego;
  int frame_index = 0;
};

// Continuous pixel coordinates and camera-frame depth.
struct Projection {
  double u;
  double v;
  double depth;
};

// Homogeneous projection of K (R p + t). Absent when depth <= 0.
std::optional<Projection> Project(const CameraModel& cam,
                                  const Eigen::Vector3d& point_ego);

}  // namespace semocc

#endif  // SEMOCC_GEOMETRY_H_
