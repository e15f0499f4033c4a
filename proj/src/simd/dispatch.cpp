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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "selfnorm/simd/kernels.hpp"
#include "selfnorm/simd/lane_ops.hpp"

namespace selfnorm::simd {

CompensatedSum combine(const CompensatedSum& a, const CompensatedSum& b) {
  const double t = a.sum + b.sum;
  const bool keep = detail::abs_bits(a.sum) >= detail::abs_bits(b.sum);
  const double big = keep ? a.sum : b.sum;
  const double small = keep ? b.sum : a.sum;
  const double err = (big - t) + small;
  return {t, (a.comp + b.comp) + err};
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("SELFNORM_ISA")) {
    const std::string requested(env);
    if (requested == "scalar") return Isa::kScalar;
    if (requested == "avx2" && avx2_supported()) return Isa::kAvx2;
  }
  return avx2_supported() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{
      initial_isa() == Isa::kAvx2 ? &avx2_kernels() : &scalar_kernels()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(); }

Isa active_isa() { return active_kernels().isa; }

void set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_supported()) {
    throw std::runtime_error("AVX2 kernels requested but CPU lacks AVX2");
  }
  active_slot().store(isa == Isa::kAvx2 ? &avx2_kernels() : &scalar_kernels());
}

}  // namespace selfnorm::simd
