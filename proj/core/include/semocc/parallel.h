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
#ifndef SEMOCC_PARALLEL_H_
#define SEMOCC_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace semocc {

// Resolves a requested worker count. Values <= 0 fall back to the
// SEMOCC_WORKERS environment variable, then to hardware concurrency.
int ResolveWorkers(int requested);

// Splits [0, n) into at most `workers` contiguous chunks and runs
// fn(begin, end) on each, one thread per chunk. Chunk boundaries depend only on
// n and the worker count; callers that write disjoint outputs per index get
// results independent of the worker count.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace semocc

#endif  // SEMOCC_PARALLEL_H_
