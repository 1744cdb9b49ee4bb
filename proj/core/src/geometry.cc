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
#include "semocc/geometry.h"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "semocc/error.h"

namespace semocc {

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()),
      translation_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ValidationError("rigid transform has non-finite entries");
  }
  const double err = OrthonormalityError(rotation);
  if (err > kOrthonormalTolerance) {
    std::ostringstream msg;
    msg << "rotation is not a proper orthonormal matrix (error " << err << ")";
    throw ValidationError(msg.str());
  }
}

RigidTransform RigidTransform::Translation(const Eigen::Vector3d& t) {
  return RigidTransform(Eigen::Matrix3d::Identity(), t);
}

RigidTransform RigidTransform::FromYaw(double yaw, const Eigen::Vector3d& t) {
  Eigen::Matrix3d r;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return RigidTransform(r, t);
}

RigidTransform RigidTransform::FromMatrix4(const Eigen::Matrix4d& m) {
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("homogeneous transform must end with row 0 0 0 1");
  }
  return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Eigen::Matrix4d RigidTransform::Matrix4() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform Compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(RigidTransform::Unchecked{},
                        a.rotation_ * b.rotation_,
                        a.rotation_ * b.translation_ + a.translation_);
}

RigidTransform Invert(const RigidTransform& t) {
  const Eigen::Matrix3d rt = t.rotation_.transpose();
  return RigidTransform(RigidTransform::Unchecked{}, rt, -(rt * t.translation_));
}

double OrthonormalityError(const Eigen::Matrix3d& rotation) {
  const double gram =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  return gram + std::abs(rotation.determinant() - 1.0);
}

CameraModel::CameraModel(const Eigen::Matrix3d& k, RigidTransform extrinsic,
                         int w, int h)
    : intrinsics(k), cam_from_ego(std::move(extrinsic)), width(w), height(h) {
  if (w <= 0 || h <= 0) {
    throw ValidationError("camera width and height must be positive");
  }
  if (!k.allFinite() || k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0) {
    throw ValidationError("camera intrinsics must be finite upper triangular");
  }
  if (k(2, 2) != 1.0) throw ValidationError("camera intrinsics need K[2][2] = 1");
  if (!(k(0, 0) > 0.0) || !(k(1, 1) > 0.0)) {
    throw ValidationError("camera focal lengths must be positive");
  }
}

std::optional<Projection> Project(const CameraModel& cam,
                                  const Eigen::Vector3d& point_ego) {
  const Eigen::Vector3d q = cam.intrinsics * cam.cam_from_ego.Apply(point_ego);
  if (!(q.z() > 0.0)) return std::nullopt;
  return Projection{q.x() / q.z(), q.y() / q.z(), q.z()};
}

}  // namespace semocc
