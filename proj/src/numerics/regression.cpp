// Copyright 2026 The selfnorm Authors.
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

#include "selfnorm/numerics/regression.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "selfnorm/numerics/summation.hpp"

namespace selfnorm::numerics {

LineFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("ols_fit: length mismatch");
  }
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("ols_fit: need at least two points");

  const double mx = pairwise_sum(xs) / static_cast<double>(n);
  const double my = pairwise_sum(ys) / static_cast<double>(n);
  std::vector<double> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = xs[i] - mx;
    dy[i] = ys[i] - my;
  }
  const double sxx = pairwise_dot(dx, dx);
  const double sxy = pairwise_dot(dx, dy);
  const double syy = pairwise_dot(dy, dy);
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("ols_fit: x values are all equal");
  }

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // Perfectly flat y is fitted exactly.
  fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace selfnorm::numerics
