// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace cothink::simd {

// Instruction-set families a kernel table can be built for. `kScalar` is the
// reference implementation every other table is checked against.
enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

// Flat table of the arithmetic inner loops used by the transformer. All
// pointers are unaligned-safe; lengths may be any size.
struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // y[r] = sum_c w[r * cols + c] * x[c], w row-major rows x cols
  void (*matvec)(const float* w, const float* x, float* y, std::size_t rows,
                 std::size_t cols);
  // y[i] = x[i] * gain[i] / sqrt(mean(x^2) + eps)
  void (*rmsnorm)(const float* x, const float* gain, float* y, std::size_t n,
                  float eps);
};

const KernelTable& scalar_kernels();

// Returns nullptr when the table was not compiled in or the running CPU
// lacks the instructions.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Table selected once per process: the best supported ISA, unless the
// COTHINK_KERNELS environment variable names one of scalar|avx2|neon.
const KernelTable& active_kernels();

// Overrides the process-wide choice. Throws std::invalid_argument when the
// requested ISA is unavailable on this machine.
void select_kernels(Isa isa);

// Convenience wrappers over active_kernels().
inline float dot(std::span<const float> a, std::span<const float> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}
inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace cothink::simd
