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

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "hrf/ckks/context.hpp"

namespace hrf::ckks {

struct Plaintext {
  RnsPoly poly;  // NTT form over q_0..q_level
  int level = 0;
  double scale = 1.0;
};

// Maps real slot vectors to plaintext polynomials through the inverse
// canonical embedding: slot j is the evaluation at zeta^(5^j), zeta being the
// primitive 2N-th root exp(i pi / N). Imaginary parts are fixed at zero.
class Encoder {
 public:
  explicit Encoder(std::shared_ptr<const Context> context) : context_(std::move(context)) {}

  const Context& context() const { return *context_; }

  // values.size() must not exceed the slot count; missing slots are zero.
  Plaintext encode(std::span<const double> values, double scale, int level) const;
  std::vector<double> decode(const Plaintext& plain) const;

  // Integer coefficient vector (before RNS reduction), exposed for tests.
  std::vector<double> embed_inverse(std::span<const double> values, double scale) const;
  // Decodes from integer coefficients (centered), i.e. canonical embedding / scale.
  std::vector<double> embed(std::span<const double> coefficients, double scale) const;

 private:
  void special_fft(std::vector<std::complex<double>>& values) const;
  void special_fft_inverse(std::vector<std::complex<double>>& values) const;

  std::shared_ptr<const Context> context_;
};

}  // namespace hrf::ckks
