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
#include "semocc/parallel.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "semocc/error.h"

namespace semocc {

int ResolveWorkers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEMOCC_WORKERS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
      throw ValidationError(std::string("SEMOCC_WORKERS is not an integer: ") +
                            env);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (chunks == 1) {
    fn(0, n);
    return;
  }
  const std::size_t step = (n + chunks - 1) / chunks;
  // Errors are rethrown from the lowest failing chunk so the reported failure
  // does not depend on thread scheduling.
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> threads;
    threads.reserve(chunks);
    std::size_t chunk = 0;
    for (std::size_t begin = 0; begin < n; begin += step, ++chunk) {
      const std::size_t end = std::min(n, begin + step);
      threads.emplace_back([&fn, &errors, chunk, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[chunk] = std::current_exception();
        }
      });
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace semocc
