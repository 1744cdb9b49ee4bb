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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "semocc/error.h"

namespace semocc {
namespace {

TEST(SegmentationMapTest, RowMajorLayout) {
  const SegmentationMap m(3, 2, std::vector<LabelId>{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(m.at(2, 0), 2);
  EXPECT_EQ(m.at(0, 1), 3);
  EXPECT_THROW(SegmentationMap(3, 2, std::vector<LabelId>{0, 1}), ValidationError);
}

TEST(SegmentationMapTest, ValidateIds) {
  const SegmentationMap m(2, 1, std::vector<LabelId>{1, kUnlabeled});
  EXPECT_NO_THROW(m.ValidateIds(2));
  EXPECT_THROW(m.ValidateIds(1), ValidationError);
}

TEST(SegmentFromFeaturesTest, ExactRowMatch) {
  Eigen::MatrixXd rows(3, 3);
  rows << 1, 0, 0, 0.2, 1, 0, 0, 0.3, 1;
  const FeatureMap f(1, 1, 3, {0.2f, 1.0f, 0.0f});
  EXPECT_EQ(SegmentFromFeatures(f, EmbeddingMatrix(rows)).labels(),
            (std::vector<LabelId>{1}));
}

TEST(SegmentFromFeaturesTest, OrthogonalBasis) {
  std::vector<float> data(16, 0.0f);
  for (int i = 0; i < 4; ++i) data[i * 4 + i] = 1.0f;
  const FeatureMap f(2, 2, 4, data);
  EXPECT_EQ(SegmentFromFeatures(f, EmbeddingMatrix(Eigen::Matrix4d::Identity())).labels(),
            (std::vector<LabelId>{0, 1, 2, 3}));
}

TEST(SegmentFromFeaturesTest, DimensionMismatchThrows) {
  const FeatureMap f(1, 1, 3, {1.0f, 0.0f, 0.0f});
  EXPECT_THROW(SegmentFromFeatures(f, EmbeddingMatrix(Eigen::Matrix2d::Identity())),
               ValidationError);
}

TEST(SegmentFromFeaturesTest, ZeroPixelStaysUnlabeled) {
  const FeatureMap f(2, 1, 2, {0.0f, 0.0f, 0.0f, 1.0f});
  EXPECT_EQ(SegmentFromFeatures(f, EmbeddingMatrix(Eigen::Matrix2d::Identity())).labels(),
            (std::vector<LabelId>{kUnlabeled, 1}));
}

TEST(SegmentFromFeaturesTest, MatchesPerPixelOracle) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  const int w = 32, h = 32, d = 12, n = 8;
  Eigen::MatrixXd rows(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) rows(i, j) = g(rng);
  std::vector<float> data(static_cast<std::size_t>(w) * h * d);
  for (auto& x : data) x = static_cast<float>(g(rng));
  const FeatureMap f(w, h, d, data);
  const EmbeddingMatrix emb(rows);
  for (int workers : {1, 3}) {
    const SegmentationMap s = SegmentFromFeatures(f, emb, workers);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        Eigen::VectorXd x(d);
        for (int c = 0; c < d; ++c) x[c] = data[(static_cast<std::size_t>(v) * w + u) * d + c];
        int best = 0;
        double best_cos = -2.0;
        for (int j = 0; j < n; ++j) {
          const double cos = rows.row(j).dot(x) / (rows.row(j).norm() * x.norm());
          if (cos > best_cos) {
            best_cos = cos;
            best = j;
          }
        }
        ASSERT_EQ(s.at(u, v), best) << "pixel " << u << "," << v;
      }
    }
  }
}

TEST(SampleNearestTest, CellContainment) {
  const LabelId a = 10, b = 11, c = 12, d = 13;
  const SegmentationMap m(2, 2, std::vector<LabelId>{a, b, c, d});
  EXPECT_EQ(SampleNearest(m, 0.4, 0.4), a);
  EXPECT_EQ(SampleNearest(m, 1.5, 0.2), b);
  EXPECT_EQ(SampleNearest(m, 0.2, 1.5), c);
  EXPECT_EQ(SampleNearest(m, 1.99, 1.99), d);
}

TEST(SampleNearestTest, OutOfBoundsThrows) {
  const SegmentationMap m(2, 2, LabelId{0});
  EXPECT_THROW(SampleNearest(m, 0.0, 1.0), ValidationError);
  EXPECT_THROW(SampleNearest(m, 2.0, 1.0), ValidationError);
  EXPECT_THROW(SampleNearest(m, 1.0, -0.5), ValidationError);
  EXPECT_THROW(SampleNearest(m, 1.0, 2.0), ValidationError);
}

TEST(SampleNearestTest, MatchesFloorIndexOracle) {
  std::mt19937_64 rng(22);
  std::vector<LabelId> labels(256);
  for (auto& l : labels) l = static_cast<LabelId>(rng() % 50);
  const SegmentationMap m(16, 16, labels);
  std::uniform_real_distribution<double> u(1e-9, 16.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    const int ix = static_cast<int>(x), iy = static_cast<int>(y);
    EXPECT_EQ(SampleNearest(m, x, y), labels[iy * 16 + ix]);
  }
}

TEST(InsideImageTest, StrictBounds) {
  EXPECT_TRUE(InsideImage(0.5, 0.5, 1, 1));
  EXPECT_FALSE(InsideImage(0.0, 0.5, 1, 1));
  EXPECT_FALSE(InsideImage(0.5, 1.0, 1, 1));
}

}  // namespace
}  // namespace semocc
