// Copyright 2026 the equiregion authors
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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "equiregion/kernels.hpp"

namespace equiregion::kernels {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(EQUIREGION_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw std::runtime_error("requested kernel ISA not available on this host");
#if defined(EQUIREGION_HAVE_AVX2)
  if (isa == Isa::kAvx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

const KernelTable& choose() {
  const char* env = std::getenv("EQUIREGION_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return detail::scalar_table();
  if (want == "avx2") return table(Isa::kAvx2);
  if (supported(Isa::kAvx2)) return table(Isa::kAvx2);
  return detail::scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = choose();
  return t;
}

std::string_view active_name() { return active().name; }

}  // namespace equiregion::kernels
