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
// Voxelization and aggregation microbenchmarks.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "semocc/reconstruction.h"

namespace semocc {
namespace {

SceneAggregate RandomCloud(std::size_t count, const GridSpec& spec) {
  std::mt19937_64 rng(42);
  const Eigen::Vector3d lo = spec.origin(), hi = spec.max_corner();
  std::uniform_real_distribution<double> x(lo.x(), hi.x()), y(lo.y(), hi.y()),
      z(lo.z(), hi.z());
  std::uniform_int_distribution<int> label(0, 15);
  SceneAggregate agg;
  for (std::size_t i = 0; i < count; ++i) {
    agg.points.emplace_back(x(rng), y(rng), z(rng));
    agg.labels.push_back(static_cast<LabelId>(label(rng)));
    agg.source_frames.push_back(0);
  }
  return agg;
}

void BM_VoxelizeMajority(benchmark::State& state) {
  const GridSpec spec;
  const SceneAggregate agg = RandomCloud(static_cast<std::size_t>(state.range(0)), spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(VoxelizeMajority(agg, spec, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VoxelizeMajority)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_VoxelizeNearest(benchmark::State& state) {
  const GridSpec spec;
  const SceneAggregate agg = RandomCloud(static_cast<std::size_t>(state.range(0)), spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(VoxelizeNearest(agg, spec, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VoxelizeNearest)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const GridSpec spec;
  const int frames = static_cast<int>(state.range(0));
  std::vector<PointCloud> clouds;
  std::vector<EgoPose> poses;
  for (int k = 0; k < frames; ++k) {
    const SceneAggregate a = RandomCloud(100000, spec);
    PointCloud c;
    c.frame_index = k;
    c.points = a.points;
    c.labels = a.labels;
    clouds.push_back(std::move(c));
    EgoPose p;
    p.frame_index = k;
    p.world_from_ego = RigidTransform::FromYaw(0.01 * k, Eigen::Vector3d(0.5 * k, 0.0, 0.0));
    poses.push_back(p);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(Aggregate(clouds, poses, {}, frames / 2, 1));
  }
  state.SetItemsProcessed(state.iterations() * frames * 100000);
}
BENCHMARK(BM_Aggregate)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace semocc

BENCHMARK_MAIN();
