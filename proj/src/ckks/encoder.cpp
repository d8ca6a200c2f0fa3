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

#include "hrf/ckks/encoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hrf/error.hpp"

namespace hrf::ckks {

namespace {

void bit_reverse_permute(std::vector<std::complex<double>>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j >= bit; bit >>= 1) j -= bit;
    j += bit;
    if (i < j) std::swap(v[i], v[j]);
  }
}

}  // namespace

void Encoder::special_fft(std::vector<std::complex<double>>& vals) const {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * context_->degree();
  const auto& roots = context_->roots();
  const auto& group = context_->rotation_group();
  bit_reverse_permute(vals);
  for (std::size_t len = 2; len <= size; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t quarter_period = len << 2;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::size_t idx = (group[j] % quarter_period) * (m / quarter_period);
        const auto u = vals[i + j];
        const auto v = vals[i + j + half] * roots[idx];
        vals[i + j] = u + v;
        vals[i + j + half] = u - v;
      }
    }
  }
}

void Encoder::special_fft_inverse(std::vector<std::complex<double>>& vals) const {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * context_->degree();
  const auto& roots = context_->roots();
  const auto& group = context_->rotation_group();
  for (std::size_t len = size; len >= 2; len >>= 1) {
    const std::size_t half = len >> 1;
    const std::size_t quarter_period = len << 2;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::size_t idx =
            (quarter_period - group[j] % quarter_period) * (m / quarter_period);
        const auto u = vals[i + j] + vals[i + j + half];
        const auto v = (vals[i + j] - vals[i + j + half]) * roots[idx];
        vals[i + j] = u;
        vals[i + j + half] = v;
      }
    }
  }
  bit_reverse_permute(vals);
  const double inv = 1.0 / static_cast<double>(size);
  for (auto& v : vals) v *= inv;
}

std::vector<double> Encoder::embed_inverse(std::span<const double> values, double scale) const {
  const std::size_t n = context_->slot_count();
  if (values.size() > n) {
    throw DimensionError("encode: " + std::to_string(values.size()) + " values exceed " +
                         std::to_string(n) + " slots");
  }
  std::vector<double> coeffs(2 * n, 0.0);
  const bool constant =
      !values.empty() && values.size() == n &&
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; });
  if (constant) {
    coeffs[0] = std::nearbyint(values[0] * scale);
    return coeffs;
  }
  std::vector<std::complex<double>> vals(n);
  for (std::size_t i = 0; i < values.size(); ++i) vals[i] = values[i];
  special_fft_inverse(vals);
  for (std::size_t i = 0; i < n; ++i) {
    coeffs[i] = std::nearbyint(vals[i].real() * scale);
    coeffs[i + n] = std::nearbyint(vals[i].imag() * scale);
  }
  return coeffs;
}

std::vector<double> Encoder::embed(std::span<const double> coefficients, double scale) const {
  const std::size_t n = context_->slot_count();
  std::vector<std::complex<double>> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = {coefficients[i] / scale, coefficients[i + n] / scale};
  special_fft(vals);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = vals[i].real();
  return out;
}

Plaintext Encoder::encode(std::span<const double> values, double scale, int level) const {
  const Context& ctx = *context_;
  if (level < 0 || level > ctx.max_level()) throw ValidationError("encode: invalid level");
  if (!(scale > 0.0)) throw ValidationError("encode: scale must be positive");
  // The message must stay decryptable modulo q_0 once every rescale is spent.
  const double bound = std::ldexp(1.0, ctx.modulus(0).bit_count() - 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || std::fabs(values[i]) * scale >= bound) {
      throw EncodingRangeError("encode: slot " + std::to_string(i) + " value " +
                               std::to_string(values[i]) + " overflows the base modulus at scale 2^" +
                               std::to_string(std::log2(scale)));
    }
  }
  const auto coeffs = embed_inverse(values, scale);
  Plaintext plain;
  plain.level = level;
  plain.scale = scale;
  plain.poly = RnsPoly(ctx.degree(), level_basis(level), false);
  const double coeff_bound = std::ldexp(1.0, 62);
  std::vector<std::int64_t> rounded(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double r = coeffs[k];
    if (std::fabs(r) >= coeff_bound) throw EncodingRangeError("encode: coefficient overflow");
    rounded[k] = static_cast<std::int64_t>(r);
  }
  for (std::size_t i = 0; i < plain.poly.count(); ++i) {
    const Modulus& q = ctx.modulus(i);
    auto comp = plain.poly.component(i);
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = q.from_signed(rounded[k]);
  }
  to_ntt(ctx, plain.poly);
  return plain;
}

std::vector<double> Encoder::decode(const Plaintext& plain) const {
  const Context& ctx = *context_;
  // Only the q_0 residue is needed: message * scale + noise is far below q_0 / 2.
  std::vector<u64> residues(plain.poly.component(0).begin(), plain.poly.component(0).end());
  if (plain.poly.ntt_form) ctx.ntt(0).inverse(residues);
  const u64 q = ctx.modulus(0).value();
  const u64 half = q >> 1;
  std::vector<double> coeffs(residues.size());
  for (std::size_t k = 0; k < residues.size(); ++k) {
    const u64 r = residues[k];
    coeffs[k] = r > half ? -static_cast<double>(q - r) : static_cast<double>(r);
  }
  return embed(coeffs, plain.scale);
}

}  // namespace hrf::ckks
