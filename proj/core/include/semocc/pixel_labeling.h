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
#ifndef SEMOCC_PIXEL_LABELING_H_
#define SEMOCC_PIXEL_LABELING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "semocc/label.h"
#include "semocc/vocab.h"

namespace semocc {

// Row-major H x W label map. Pixel (u, v) covers [u, u+1) x [v, v+1).
class SegmentationMap {
 public:
  SegmentationMap() = default;
  SegmentationMap(int width, int height, LabelId fill = kUnlabeled);
  // Throws ValidationError unless labels.size() == width * height.
  SegmentationMap(int width, int height, std::vector<LabelId> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<LabelId>& labels() const { return labels_; }
  std::vector<LabelId>& mutable_labels() { return labels_; }

  LabelId at(int u, int v) const {
    return labels_[static_cast<std::size_t>(v) * width_ + u];
  }
  void set(int u, int v, LabelId id) {
    labels_[static_cast<std::size_t>(v) * width_ + u] = id;
  }

  // Throws ValidationError if a non-sentinel id is >= vocab_size.
  void ValidateIds(std::size_t vocab_size) const;

  friend bool operator==(const SegmentationMap&, const SegmentationMap&) =
      default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<LabelId> labels_;
};

// Row-major H x W x D features at image resolution.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int width, int height, int channels, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  const std::vector<float>& data() const { return data_; }

  std::span<const float> pixel(int u, int v) const {
    const std::size_t offset =
        (static_cast<std::size_t>(v) * width_ + u) * channels_;
    return {data_.data() + offset, static_cast<std::size_t>(channels_)};
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Per-pixel Classify against `emb`. Zero-norm pixels become kUnlabeled.
SegmentationMap SegmentFromFeatures(const FeatureMap& features,
                                    const EmbeddingMatrix& emb,
                                    int workers = 1);

// True iff 0 < u < width and 0 < v < height (strict on both ends).
bool InsideImage(double u, double v, int width, int height);

// Nearest-neighbour lookup of the cell containing (u, v). Throws
// ValidationError for coordinates outside the strict image bounds.
LabelId SampleNearest(const SegmentationMap& map, double u, double v);

}  // namespace semocc

#endif  // SEMOCC_PIXEL_LABELING_H_
