// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cothink/simd/kernels.hpp"

namespace cothink::simd {
namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_kernels();
    case Isa::kAvx2:
      return avx2_kernels();
    case Isa::kNeon:
      return neon_kernels();
  }
  return nullptr;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("COTHINK_KERNELS")) {
    const std::string want(env);
    Isa isa = Isa::kScalar;
    if (want == "avx2") {
      isa = Isa::kAvx2;
    } else if (want == "neon") {
      isa = Isa::kNeon;
    } else if (want != "scalar" && want != "auto") {
      throw std::invalid_argument("COTHINK_KERNELS: unknown ISA '" + want + "'");
    }
    if (want != "auto") {
      const KernelTable* t = table_for(isa);
      if (t == nullptr) {
        throw std::invalid_argument("COTHINK_KERNELS: '" + want +
                                    "' is not supported on this CPU");
      }
      return t;
    }
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> active{detect()};
  return active;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& active_kernels() { return *slot().load(std::memory_order_acquire); }

void select_kernels(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) {
    throw std::invalid_argument(std::string("kernel ISA not available: ") +
                                std::string(isa_name(isa)));
  }
  slot().store(t, std::memory_order_release);
}

}  // namespace cothink::simd
