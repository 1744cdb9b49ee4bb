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
#include "semocc/losses.h"

#include <cmath>
#include <string>

#include "semocc/error.h"

namespace semocc {
namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckGeometry(const PredictionVolume& pred, const OccupancyGrid& gt) {
  pred.Validate();
  if (!pred.spec.SameLattice(gt.spec) ||
      gt.occupied.size() != static_cast<std::size_t>(pred.geometry.rows())) {
    throw ValidationError("prediction and occupancy grids differ in shape");
  }
}

void CheckLanguage(const PredictionVolume& pred, const LanguageTarget& target) {
  pred.Validate();
  if (!pred.spec.SameLattice(target.grid.spec) ||
      target.grid.labels.size() != static_cast<std::size_t>(pred.language.rows())) {
    throw ValidationError("prediction and language target differ in shape");
  }
  if (target.target_embeddings.dim() != pred.language.cols()) {
    throw ValidationError("language dimension " +
                          std::to_string(pred.language.cols()) +
                          " does not match target dimension " +
                          std::to_string(target.target_embeddings.dim()));
  }
  for (LabelId id : target.grid.labels) {
    if (!IsSentinel(id) && id >= target.target_embeddings.size()) {
      throw ValidationError("voxel label " + std::to_string(id) +
                            " has no target embedding");
    }
  }
}

}  // namespace

void PredictionVolume::Validate() const {
  const auto n = static_cast<Eigen::Index>(spec.voxel_count());
  if (geometry.rows() != n || language.rows() != n) {
    throw ValidationError("prediction volume rows do not match grid voxel count");
  }
}

double GeometryLoss(const PredictionVolume& pred, const OccupancyGrid& gt) {
  CheckGeometry(pred, gt);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.geometry.rows(); ++i) {
    const int y = gt.occupied[i] ? 1 : 0;
    sum += Softplus(pred.geometry(i, 1 - y) - pred.geometry(i, y));
  }
  return sum / static_cast<double>(pred.geometry.rows());
}

Eigen::MatrixX2d GeometryLossGradient(const PredictionVolume& pred,
                                      const OccupancyGrid& gt) {
  CheckGeometry(pred, gt);
  const double n = static_cast<double>(pred.geometry.rows());
  Eigen::MatrixX2d grad(pred.geometry.rows(), 2);
  for (Eigen::Index i = 0; i < pred.geometry.rows(); ++i) {
    const int y = gt.occupied[i] ? 1 : 0;
    const double s = Sigmoid(pred.geometry(i, 1 - y) - pred.geometry(i, y)) / n;
    grad(i, 1 - y) = s;
    grad(i, y) = -s;
  }
  return grad;
}

LanguageLoss ComputeLanguageLoss(const PredictionVolume& pred,
                                 const LanguageTarget& target) {
  CheckLanguage(pred, target);
  const auto& emb = target.target_embeddings;
  LanguageLoss loss;
  for (std::size_t v = 0; v < target.grid.labels.size(); ++v) {
    const LabelId id = target.grid.labels[v];
    if (IsSentinel(id)) continue;
    const auto o = pred.language.row(static_cast<Eigen::Index>(v));
    const double norm = o.norm();
    if (norm == 0.0) {
      throw ProcessingError("zero language prediction at voxel " +
                            std::to_string(v));
    }
    loss.sum += 1.0 - emb.row(id).dot(o) / (emb.row_norms()[id] * norm);
    ++loss.count;
  }
  return loss;
}

Eigen::MatrixXd LanguageLossGradient(const PredictionVolume& pred,
                                     const LanguageTarget& target) {
  CheckLanguage(pred, target);
  const auto& emb = target.target_embeddings;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(pred.language.rows(),
                                               pred.language.cols());
  for (std::size_t v = 0; v < target.grid.labels.size(); ++v) {
    const LabelId id = target.grid.labels[v];
    if (IsSentinel(id)) continue;
    const auto row = static_cast<Eigen::Index>(v);
    const Eigen::RowVectorXd o = pred.language.row(row);
    const double on = o.norm();
    if (on == 0.0) {
      throw ProcessingError("zero language prediction at voxel " +
                            std::to_string(v));
    }
    const double tn = emb.row_norms()[id];
    const double cos = emb.row(id).dot(o) / (tn * on);
    // d(1 - cos)/do = -(t / (|t||o|) - cos * o / |o|^2)
    grad.row(row) = -(emb.row(id) / (tn * on) - cos * o / (on * on));
  }
  return grad;
}

double TotalLoss(const PredictionVolume& pred, const OccupancyGrid& gt,
                 const LanguageTarget& target) {
  return GeometryLoss(pred, gt) + ComputeLanguageLoss(pred, target).sum;
}

}  // namespace semocc
