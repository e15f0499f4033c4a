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

#pragma once

namespace selfnorm::numerics {

/// Complementary error function. Rational Chebyshev approximation (Cody,
/// 1969) with the exp(-x^2) factor split so the result keeps full relative
/// precision deep into the right tail.
double erfc(double x);

/// Standard normal distribution function. For z >= 0 the value is computed
/// as 1 - Phi(-z), so Phi(z) + Phi(-z) == 1 up to one rounding.
double normal_cdf(double z);

/// Inverse of normal_cdf on (0, 1) (Wichura's AS241, ~1e-16 relative).
/// Returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta) / (2R)).
double dkw_band(double replications, double delta);

/// Two-sided critical value of the standard normal at confidence `level`.
double normal_critical(double level);

}  // namespace selfnorm::numerics
