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
#include "semocc/pixel_labeling.h"

#include <cmath>
#include <string>

#include "semocc/error.h"
#include "semocc/parallel.h"

namespace semocc {
namespace {

void CheckSize(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("map dimensions must be positive");
  }
}

}  // namespace

SegmentationMap::SegmentationMap(int width, int height, LabelId fill)
    : width_(width), height_(height) {
  CheckSize(width, height);
  labels_.assign(static_cast<std::size_t>(width) * height, fill);
}

SegmentationMap::SegmentationMap(int width, int height,
                                 std::vector<LabelId> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  CheckSize(width, height);
  if (labels_.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("segmentation map holds " +
                          std::to_string(labels_.size()) + " cells, expected " +
                          std::to_string(static_cast<std::size_t>(width) * height));
  }
}

void SegmentationMap::ValidateIds(std::size_t vocab_size) const {
  for (LabelId id : labels_) {
    if (!IsSentinel(id) && id >= vocab_size) {
      throw ValidationError("segmentation label " + std::to_string(id) +
                            " outside vocabulary of size " +
                            std::to_string(vocab_size));
    }
  }
}

FeatureMap::FeatureMap(int width, int height, int channels,
                       std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  CheckSize(width, height);
  if (channels <= 0) throw ValidationError("feature map needs channels > 0");
  const std::size_t expected =
      static_cast<std::size_t>(width) * height * channels;
  if (data_.size() != expected) {
    throw ValidationError("feature map holds " + std::to_string(data_.size()) +
                          " values, expected " + std::to_string(expected));
  }
}

SegmentationMap SegmentFromFeatures(const FeatureMap& features,
                                    const EmbeddingMatrix& emb, int workers) {
  if (features.channels() != emb.dim()) {
    throw ValidationError("feature map has " +
                          std::to_string(features.channels()) +
                          " channels but embeddings have dimension " +
                          std::to_string(emb.dim()));
  }
  if (emb.size() == 0) throw ValidationError("empty embedding matrix");
  SegmentationMap out(features.width(), features.height());
  const int width = features.width();
  ParallelFor(static_cast<std::size_t>(features.height()), workers,
              [&](std::size_t begin, std::size_t end) {
                Eigen::VectorXd f(features.channels());
                for (std::size_t v = begin; v < end; ++v) {
                  for (int u = 0; u < width; ++u) {
                    const auto px = features.pixel(u, static_cast<int>(v));
                    for (int c = 0; c < features.channels(); ++c) f[c] = px[c];
                    if (f.squaredNorm() == 0.0) continue;  // stays unlabeled
                    out.set(u, static_cast<int>(v), Classify(f, emb).label);
                  }
                }
              });
  return out;
}

bool InsideImage(double u, double v, int width, int height) {
  return u > 0.0 && u < width && v > 0.0 && v < height;
}

LabelId SampleNearest(const SegmentationMap& map, double u, double v) {
  if (!InsideImage(u, v, map.width(), map.height())) {
    throw ValidationError("sample coordinate (" + std::to_string(u) + ", " +
                          std::to_string(v) + ") outside image bounds");
  }
  return map.at(static_cast<int>(std::floor(u)), static_cast<int>(std::floor(v)));
}

}  // namespace semocc
