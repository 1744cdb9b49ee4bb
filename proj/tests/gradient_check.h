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
// Central finite differences for gradient checks.

#ifndef SEMOCC_TESTS_GRADIENT_CHECK_H_
#define SEMOCC_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <functional>

#include <Eigen/Core>

namespace semocc::gradcheck {

inline constexpr double kStep = 1e-5;

// Numerical gradient of f with respect to every entry of x. x is perturbed in
// place and restored.
template <typename Matrix>
Matrix Numerical(Matrix& x, const std::function<double()>& f, double h = kStep) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f();
    x.data()[i] = saved - h;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - n|| / max(||a||, ||n||), 0 when both vanish.
template <typename A, typename B>
double RelativeError(const A& analytic, const B& numerical) {
  const double scale = std::max(analytic.norm(), numerical.norm());
  if (scale == 0.0) return 0.0;
  return (analytic - numerical).norm() / scale;
}

}  // namespace semocc::gradcheck

#endif  // SEMOCC_TESTS_GRADIENT_CHECK_H_
