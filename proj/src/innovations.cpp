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

#include "selfnorm/innovations.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace selfnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int p) {
  double f = 1.0;
  for (int k = 2; k <= p; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

void check_order(int p) {
  if (p < 0 || p > 4) throw std::invalid_argument("moment order must be 0..4");
}

// --- Exp(1) - 1 ----------------------------------------------------------

// int_0^y v^p e^{-v} dv
double lower_gamma(int p, double y) {
  if (y == kInf) return factorial(p);
  if (y <= p + 1.0) {
    // p! e^{-y} sum_{k > p} y^k / k!, all terms positive.
    double term = 1.0;
    for (int k = 1; k <= p + 1; ++k) term *= y / k;
    double sum = 0.0;
    for (int k = p + 1; k < 400; ++k) {
      sum += term;
      term *= y / (k + 1);
      if (term < 1e-18 * sum) break;
    }
    return factorial(p) * std::exp(-y) * sum;
  }
  double partial = 0.0, term = 1.0;
  for (int k = 0; k <= p; ++k) {
    partial += term;
    term *= y / (k + 1);
  }
  return factorial(p) * (1.0 - std::exp(-y) * partial);
}

// int_y^inf v^p e^{-v} dv
double upper_gamma(int p, double y) {
  if (y == kInf) return 0.0;
  double partial = 0.0, term = 1.0;
  for (int k = 0; k <= p; ++k) {
    partial += term;
    term *= y / (k + 1);
  }
  return factorial(p) * std::exp(-y) * partial;
}

// int_0^c v^p e^{v} dv for c in [0, 1]
double rising_exp_integral(int p, double c) {
  if (c <= 0.0) return 0.0;
  double sum = 0.0;
  double cpow = std::pow(c, p + 1);
  double kfact = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double term = cpow / (kfact * (p + k + 1));
    sum += term;
    if (term < 1e-18 * sum) break;
    cpow *= c;
    kfact *= (k + 1);
  }
  return sum;
}

double exponential_truncated(int p, double u) {
  const double lower = rising_exp_integral(p, std::min(u, 1.0));
  return std::exp(-1.0) * (lower_gamma(p, u) + lower);
}

double exponential_tail(int p, double u) {
  const double lower =
      u < 1.0 ? rising_exp_integral(p, 1.0) - rising_exp_integral(p, u) : 0.0;
  return std::exp(-1.0) * (upper_gamma(p, u) + lower);
}

double exponential_truncated_mean(double u) {
  return std::exp(-1.0) *
         (lower_gamma(1, u) - rising_exp_integral(1, std::min(u, 1.0)));
}

// --- Pareto(1, alpha) - alpha / (alpha - 1) ------------------------------

// int_a^b x^k alpha x^{-alpha-1} dx, 1 <= a <= b <= inf.
double pareto_power_integral(double alpha, int k, double a, double b) {
  if (!(b > a)) return 0.0;
  const double e = k - alpha;
  if (b == kInf) {
    if (e >= 0.0) throw UnsupportedMoment("Pareto moment is infinite");
    return alpha / -e * std::pow(a, e);
  }
  if (e == 0.0) return alpha * (std::log(b) - std::log(a));
  return alpha / e * (std::pow(b, e) - std::pow(a, e));
}

// int_a^b |x - mu|^p alpha x^{-alpha-1} dx with [a, b] on one side of mu.
double pareto_abs_piece(double alpha, double mu, int p, double a, double b,
                        bool below_mean) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  for (int k = 0; k <= p; ++k) {
    // below: (mu - x)^p = sum C(p,k) mu^{p-k} (-x)^k
    // above: (x - mu)^p = sum C(p,k) (-mu)^{p-k} x^k
    const double coef = below_mean ? binomial(p, k) * std::pow(mu, p - k) *
                                         ((k % 2) ? -1.0 : 1.0)
                                   : binomial(p, k) * std::pow(-mu, p - k);
    total += coef * pareto_power_integral(alpha, k, a, b);
  }
  return std::max(total, 0.0);
}

double pareto_truncated(double alpha, int p, double u) {
  const double mu = alpha / (alpha - 1.0);
  const double lo = std::max(1.0, mu - u);
  const double hi = mu + u;
  return pareto_abs_piece(alpha, mu, p, lo, mu, true) +
         pareto_abs_piece(alpha, mu, p, mu, hi, false);
}

double pareto_tail(double alpha, int p, double u) {
  const double mu = alpha / (alpha - 1.0);
  double total = 0.0;
  if (mu - u > 1.0) total += pareto_abs_piece(alpha, mu, p, 1.0, mu - u, true);
  if (p > 0 && alpha <= p) throw UnsupportedMoment("Pareto moment is infinite");
  total += pareto_abs_piece(alpha, mu, p, mu + u, kInf, false);
  return total;
}

double pareto_truncated_mean(double alpha, double u) {
  const double mu = alpha / (alpha - 1.0);
  const double lo = std::max(1.0, mu - u);
  const double hi = mu + u;
  if (hi == kInf) return 0.0;
  return pareto_power_integral(alpha, 1, lo, hi) -
         mu * pareto_power_integral(alpha, 0, lo, hi);
}

double discrete_moment(const DiscreteLaw& law, int p, double u, bool tail) {
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double a = std::fabs(law.value[k]);
    if ((a > u) == tail) total += law.prob[k] * std::pow(a, p);
  }
  return total;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kRademacher: return "rademacher";
    case Family::kUniformCentered: return "uniform_centered";
    case Family::kExponentialCentered: return "exponential_centered";
    case Family::kTwoPoint: return "two_point_asymmetric";
    case Family::kParetoCentered: return "pareto_centered";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::kRademacher, Family::kUniformCentered,
                   Family::kExponentialCentered, Family::kTwoPoint,
                   Family::kParetoCentered}) {
    if (family_name(f) == name) return f;
  }
  if (name == "uniform") return Family::kUniformCentered;
  if (name == "exponential") return Family::kExponentialCentered;
  if (name == "two_point") return Family::kTwoPoint;
  if (name == "pareto") return Family::kParetoCentered;
  throw std::invalid_argument("unknown innovation family '" +
                              std::string(name) + "'");
}

InnovationSpec InnovationSpec::rademacher(double scale) {
  return {Family::kRademacher, scale, 0.0};
}
InnovationSpec InnovationSpec::uniform(double scale) {
  return {Family::kUniformCentered, scale, 0.0};
}
InnovationSpec InnovationSpec::exponential(double scale) {
  return {Family::kExponentialCentered, scale, 0.0};
}
InnovationSpec InnovationSpec::two_point(double p, double scale) {
  return {Family::kTwoPoint, scale, p};
}
InnovationSpec InnovationSpec::pareto(double alpha, double scale) {
  return {Family::kParetoCentered, scale, alpha};
}

void InnovationSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("innovation scale must be positive");
  }
  if (family == Family::kTwoPoint && !(param > 0.0 && param < 1.0)) {
    throw std::invalid_argument("two-point p must lie in (0, 1)");
  }
  if (family == Family::kParetoCentered && !(param > 1.0)) {
    throw std::invalid_argument("Pareto alpha must exceed 1 for centering");
  }
}

bool InnovationSpec::is_discrete() const {
  return family == Family::kRademacher || family == Family::kTwoPoint;
}

DiscreteLaw InnovationSpec::discrete_law() const {
  switch (family) {
    case Family::kRademacher:
      return {{-scale, scale}, {0.5, 0.5}};
    case Family::kTwoPoint:
      return {{-scale * param, scale * (1.0 - param)}, {1.0 - param, param}};
    default:
      throw std::logic_error("discrete_law on a continuous family");
  }
}

bool InnovationSpec::has_moment(int p) const {
  return family != Family::kParetoCentered || p == 0 || param > p;
}

double InnovationSpec::variance() const {
  const double s2 = scale * scale;
  switch (family) {
    case Family::kRademacher: return s2;
    case Family::kUniformCentered: return s2 / 3.0;
    case Family::kExponentialCentered: return s2;
    case Family::kTwoPoint: return s2 * param * (1.0 - param);
    case Family::kParetoCentered:
      if (!(param > 2.0)) throw UnsupportedMoment("Pareto variance infinite");
      return s2 * param / ((param - 1.0) * (param - 1.0) * (param - 2.0));
  }
  return 0.0;
}

double InnovationSpec::from_uniform(double u) const {
  switch (family) {
    case Family::kRademacher: return u < 0.5 ? -scale : scale;
    case Family::kUniformCentered: return scale * (2.0 * u - 1.0);
    case Family::kExponentialCentered:
      return scale * (-std::log1p(-u) - 1.0);
    case Family::kTwoPoint:
      return u < param ? scale * (1.0 - param) : -scale * param;
    case Family::kParetoCentered:
      return scale * (std::pow(1.0 - u, -1.0 / param) -
                      param / (param - 1.0));
  }
  return 0.0;
}

double InnovationSpec::truncated_abs_moment(int p, double t) const {
  check_order(p);
  if (t < 0.0) return 0.0;
  const double u = t / scale;
  const double sp = std::pow(scale, p);
  switch (family) {
    case Family::kRademacher:
    case Family::kTwoPoint:
      return discrete_moment(discrete_law(), p, t, false);
    case Family::kUniformCentered:
      return sp * std::pow(std::min(u, 1.0), p + 1) / (p + 1);
    case Family::kExponentialCentered:
      return sp * exponential_truncated(p, u);
    case Family::kParetoCentered:
      if (u == kInf && !has_moment(p)) {
        throw UnsupportedMoment("Pareto moment is infinite");
      }
      return sp * pareto_truncated(param, p, u);
  }
  return 0.0;
}

double InnovationSpec::tail_abs_moment(int p, double t) const {
  check_order(p);
  if (t == kInf) return 0.0;
  if (!has_moment(p)) throw UnsupportedMoment("Pareto moment is infinite");
  const double u = std::max(t, 0.0) / scale;
  const double sp = std::pow(scale, p);
  switch (family) {
    case Family::kRademacher:
    case Family::kTwoPoint:
      return discrete_moment(discrete_law(), p, std::max(t, 0.0), true);
    case Family::kUniformCentered:
      return sp * (1.0 - std::pow(std::min(u, 1.0), p + 1)) / (p + 1);
    case Family::kExponentialCentered:
      return sp * exponential_tail(p, u);
    case Family::kParetoCentered:
      return sp * pareto_tail(param, p, u);
  }
  return 0.0;
}

double InnovationSpec::truncated_mean(double t) const {
  if (t < 0.0) return 0.0;
  const double u = t / scale;
  switch (family) {
    case Family::kRademacher:
    case Family::kTwoPoint: {
      const DiscreteLaw law = discrete_law();
      double m = 0.0;
      for (int k = 0; k < 2; ++k) {
        if (std::fabs(law.value[k]) <= t) m += law.prob[k] * law.value[k];
      }
      return m;
    }
    case Family::kUniformCentered: return 0.0;
    case Family::kExponentialCentered:
      return u == kInf ? 0.0 : scale * exponential_truncated_mean(u);
    case Family::kParetoCentered:
      return scale * pareto_truncated_mean(param, u);
  }
  return 0.0;
}

std::string InnovationSpec::describe() const {
  std::ostringstream os;
  os << family_name(family) << "(scale=" << scale;
  if (family == Family::kTwoPoint) os << ", p=" << param;
  if (family == Family::kParetoCentered) os << ", alpha=" << param;
  os << ")";
  return os.str();
}

}  // namespace selfnorm
