// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cothink/simd/kernels.hpp"
#include "test_util.hpp"

namespace cothink::simd {
namespace {

using testing::max_rel_error;
using testing::random_floats;

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  if (const KernelTable* t = avx2_kernels()) out.push_back(t);
  if (const KernelTable* t = neon_kernels()) out.push_back(t);
  return out;
}

// Plain double-precision loops, independent of every table.
double ref_dot(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

TEST(Kernels, ScalarDotMatchesDoubleReference) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 7u, 16u, 33u, 200u}) {
    auto a = random_floats(rng, n);
    auto b = random_floats(rng, n);
    EXPECT_NEAR(scalar_kernels().dot(a.data(), b.data(), n), ref_dot(a, b), 1e-4) << n;
  }
}

TEST(Kernels, ScalarRmsnormMatchesDefinition) {
  std::mt19937_64 rng(2);
  auto x = random_floats(rng, 24);
  auto g = random_floats(rng, 24, 0.5f, 1.5f);
  std::vector<float> y(24);
  scalar_kernels().rmsnorm(x.data(), g.data(), y.data(), 24, 1e-5f);
  double ms = 0.0;
  for (float v : x) ms += static_cast<double>(v) * v;
  const double inv = 1.0 / std::sqrt(ms / 24 + 1e-5);
  for (int i = 0; i < 24; ++i) EXPECT_NEAR(y[i], x[i] * g[i] * inv, 1e-5);
}

TEST(Kernels, VectorTablesMatchScalar) {
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(3);
  for (const KernelTable* t : vector_tables()) {
    SCOPED_TRACE(std::string(isa_name(t->isa)));
    for (std::size_t n = 0; n <= 67; ++n) {
      auto a = random_floats(rng, n);
      auto b = random_floats(rng, n);
      const float want = ref.dot(a.data(), b.data(), n);
      EXPECT_NEAR(t->dot(a.data(), b.data(), n), want, 1e-5f * (1.0f + std::abs(want)));

      auto y1 = random_floats(rng, n);
      auto y2 = y1;
      ref.axpy(0.37f, a.data(), y1.data(), n);
      t->axpy(0.37f, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y2[i], y1[i], 1e-6f);

      if (n == 0) continue;
      auto g = random_floats(rng, n, 0.5f, 1.5f);
      std::vector<float> r1(n), r2(n);
      ref.rmsnorm(a.data(), g.data(), r1.data(), n, 1e-5f);
      t->rmsnorm(a.data(), g.data(), r2.data(), n, 1e-5f);
      EXPECT_LE(max_rel_error(r2, r1), 1e-5);
    }
    for (std::size_t rows : {1u, 5u, 32u}) {
      for (std::size_t cols : {1u, 9u, 64u, 70u}) {
        auto w = random_floats(rng, rows * cols);
        auto x = random_floats(rng, cols);
        std::vector<float> y1(rows), y2(rows);
        ref.matvec(w.data(), x.data(), y1.data(), rows, cols);
        t->matvec(w.data(), x.data(), y2.data(), rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
          EXPECT_NEAR(y2[r], y1[r], 1e-5f * (1.0f + std::abs(y1[r])));
        }
      }
    }
  }
}

TEST(Kernels, SelectScalarRoundTrip) {
  const Isa before = active_kernels().isa;
  select_kernels(Isa::kScalar);
  EXPECT_EQ(active_kernels().isa, Isa::kScalar);
  select_kernels(before);
  EXPECT_EQ(active_kernels().isa, before);
}

TEST(Kernels, UnavailableIsaThrows) {
  if (neon_kernels() == nullptr) EXPECT_THROW(select_kernels(Isa::kNeon), std::invalid_argument);
  if (avx2_kernels() == nullptr) EXPECT_THROW(select_kernels(Isa::kAvx2), std::invalid_argument);
}

}  // namespace
}  // namespace cothink::simd
