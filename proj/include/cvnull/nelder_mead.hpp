// Copyright 2026 The cvnull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cvnull {

struct NelderMeadOptions {
  int max_iterations = 4000;
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-8;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization of f: ℝⁿ → ℝ starting from the simplex
/// {start, start + step_i e_i}. Stops when both the value spread and the
/// simplex diameter fall below their tolerances.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& start, const std::vector<double>& step,
                             const NelderMeadOptions& opts = {}) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];

  NelderMeadResult res;
  std::vector<double> fx(n + 1);
  auto eval = [&](const std::vector<double>& p) {
    ++res.evaluations;
    return f(p);
  };
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto along = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double coef) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + coef * (worst[i] - centroid[i]);
    return p;
  };

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        s2[k] = simplex[order[k]];
        f2[k] = fx[order[k]];
      }
      simplex.swap(s2);
      fx.swap(f2);
    }

    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[0][i]));
    if (fx[n] - fx[0] <= opts.f_tolerance && diameter <= opts.x_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);

    const auto reflected = along(centroid, simplex[n], -opts.reflection);
    const double fr = eval(reflected);
    if (fr < fx[0]) {
      const auto expanded = along(centroid, simplex[n], -opts.reflection * opts.expansion);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        fx[n] = fe;
      } else {
        simplex[n] = reflected;
        fx[n] = fr;
      }
      continue;
    }
    if (fr < fx[n - 1]) {
      simplex[n] = reflected;
      fx[n] = fr;
      continue;
    }
    const bool outside = fr < fx[n];
    const auto contracted =
        outside ? along(centroid, reflected, opts.contraction) : along(centroid, simplex[n], opts.contraction);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : fx[n])) {
      simplex[n] = contracted;
      fx[n] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) simplex[k][i] = simplex[0][i] + opts.shrink * (simplex[k][i] - simplex[0][i]);
      fx[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  res.x = simplex[best];
  res.value = fx[best];
  return res;
}

}  // namespace cvnull
