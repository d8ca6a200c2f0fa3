/*
 * Copyright (c) 2026 The hrforest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hrf/ckks/context.hpp"

namespace hrf::ckks::detail {

constexpr double kErrorStddev = 3.2;

inline std::vector<std::int64_t> sample_ternary(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-1, 1);
  std::vector<std::int64_t> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

inline std::vector<std::int64_t> sample_gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, kErrorStddev);
  const double bound = 6.0 * kErrorStddev;
  std::vector<std::int64_t> out(n);
  for (auto& v : out) {
    double x = dist(rng);
    while (std::fabs(x) > bound) x = dist(rng);
    v = static_cast<std::int64_t>(std::nearbyint(x));
  }
  return out;
}

// Small signed coefficients lifted into every component, then NTT'd.
inline RnsPoly lift_small(const Context& ctx, const std::vector<std::int64_t>& coeffs,
                          std::vector<std::size_t> basis) {
  RnsPoly poly(ctx.degree(), std::move(basis), false);
  for (std::size_t i = 0; i < poly.count(); ++i) {
    const Modulus& q = ctx.modulus(poly.basis[i]);
    auto comp = poly.component(i);
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = q.from_signed(coeffs[k]);
  }
  to_ntt(ctx, poly);
  return poly;
}

// Uniform residues; uniform in coefficient form is uniform in NTT form.
inline RnsPoly sample_uniform(const Context& ctx, std::vector<std::size_t> basis, std::mt19937_64& rng) {
  RnsPoly poly(ctx.degree(), std::move(basis), true);
  for (std::size_t i = 0; i < poly.count(); ++i) {
    std::uniform_int_distribution<u64> dist(0, ctx.modulus(poly.basis[i]).value() - 1);
    for (auto& v : poly.component(i)) v = dist(rng);
  }
  return poly;
}

}  // namespace hrf::ckks::detail
