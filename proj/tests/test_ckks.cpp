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

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hrf/ckks/cipher.hpp"
#include "hrf/ckks/evaluator.hpp"
#include "hrf/ckks/serialize.hpp"
#include "hrf/error.hpp"

using namespace hrf::ckks;

namespace {

std::shared_ptr<const Context> small_context(int log_degree = 5, int depth = 3) {
  CkksParameters p;
  p.log_degree = log_degree;
  p.depth = depth;
  return std::make_shared<const Context>(p);
}

std::vector<double> random_values(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Naive negacyclic product modulo q.
std::vector<u64> schoolbook(const std::vector<u64>& a, const std::vector<u64>& b, const Modulus& q) {
  const std::size_t n = a.size();
  std::vector<u64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const u64 t = q.mul(a[i], b[j]);
      const std::size_t k = (i + j) % n;
      out[k] = (i + j < n) ? q.add(out[k], t) : q.sub(out[k], t);
    }
  return out;
}

struct Fixture {
  std::shared_ptr<const Context> ctx = small_context();
  KeyGenerator keygen{ctx, 7};
  KeySet keys = keygen.create_key_set({1, 2, 3, 4, 8});
  Encoder encoder{ctx};
  Encryptor encryptor{ctx, keys.public_key, keys.id, 99};
  Decryptor decryptor{ctx, keys.secret};
  Evaluator eval{ctx};

  Ciphertext encrypt(const std::vector<double>& v, int level = -1) {
    return encryptor.encrypt(encoder.encode(v, ctx->default_scale(), level < 0 ? ctx->max_level() : level));
  }
  std::vector<double> decrypt(const Ciphertext& ct) { return encoder.decode(decryptor.decrypt(ct)); }
};

}  // namespace

TEST_CASE("modulus chain is NTT friendly and distinct") {
  auto ctx = small_context(6, 4);
  const auto chain = ctx->chain_values();
  REQUIRE(chain.size() == 6);
  const u64 two_n = 2 * ctx->degree();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    CHECK(is_prime(chain[i]));
    CHECK(chain[i] % two_n == 1);
    for (std::size_t j = 0; j < i; ++j) CHECK(chain[i] != chain[j]);
  }
  CHECK(std::bit_width(chain.front()) == 60);
  CHECK(std::bit_width(chain.back()) == 60);
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
    CHECK(std::abs(std::log2(static_cast<double>(chain[i])) - 40.0) < 0.01);
  }
}

TEST_CASE("NTT round trip and negacyclic convolution") {
  auto ctx = small_context(6, 2);
  std::mt19937_64 rng(3);
  for (std::size_t m = 0; m < ctx->modulus_count(); ++m) {
    const Modulus& q = ctx->modulus(m);
    std::vector<u64> a(ctx->degree()), b(ctx->degree());
    for (auto& x : a) x = rng() % q.value();
    for (auto& x : b) x = rng() % q.value();
    const auto expected = schoolbook(a, b, q);
    auto fa = a, fb = b;
    ctx->ntt(m).forward(fa);
    ctx->ntt(m).forward(fb);
    auto g = fa;
    ctx->ntt(m).inverse(g);
    CHECK(g == a);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = q.mul(fa[i], fb[i]);
    ctx->ntt(m).inverse(fa);
    CHECK(fa == expected);
  }
}

TEST_CASE("encoder matches the canonical embedding evaluated directly") {
  auto ctx = small_context(5, 1);
  Encoder encoder(ctx);
  const std::size_t n_deg = ctx->degree();
  const std::size_t slots = ctx->slot_count();
  const double scale = std::ldexp(1.0, 30);
  const auto z = random_values(slots, -3, 3, 11);
  const auto coeffs = encoder.embed_inverse(z, scale);
  REQUIRE(coeffs.size() == n_deg);

  // Oracle: evaluate the integer polynomial at zeta^(5^j) by Horner-free sums.
  std::size_t power = 1;
  for (std::size_t j = 0; j < slots; ++j) {
    std::complex<double> acc = 0;
    for (std::size_t k = 0; k < n_deg; ++k) {
      const double angle = std::numbers::pi * static_cast<double>((power * k) % (2 * n_deg)) / n_deg;
      acc += coeffs[k] * std::polar(1.0, angle);
    }
    CHECK(std::abs(acc.real() / scale - z[j]) < 1e-7);
    CHECK(std::abs(acc.imag() / scale) < 1e-7);
    power = (power * 5) % (2 * n_deg);
  }
  for (double c : coeffs) CHECK(c == std::round(c));

  const auto back = encoder.embed(coeffs, scale);
  CHECK(max_abs_diff(back, z, slots) < 1e-7);
}

TEST_CASE("encode and decode round trip") {
  auto ctx = small_context(6, 2);
  Encoder encoder(ctx);
  const auto z = random_values(ctx->slot_count(), -100, 100, 5);
  for (int level = 0; level <= ctx->max_level(); ++level) {
    const auto plain = encoder.encode(z, ctx->default_scale(), level);
    CHECK(plain.level == level);
    CHECK(plain.poly.count() == static_cast<std::size_t>(level) + 1);
    CHECK(max_abs_diff(encoder.decode(plain), z, z.size()) < 1e-9);
  }
  std::vector<double> constant(ctx->slot_count(), 0.375);
  CHECK(max_abs_diff(encoder.decode(encoder.encode(constant, ctx->default_scale(), 1)), constant,
                     constant.size()) < 1e-12);
}

TEST_CASE("encoder rejects out-of-range input") {
  auto ctx = small_context(5, 1);
  Encoder encoder(ctx);
  std::vector<double> v(ctx->slot_count(), 0.0);
  v[3] = std::ldexp(1.0, 30);
  CHECK_THROWS_AS(encoder.encode(v, ctx->default_scale(), 1), hrf::EncodingRangeError);
  v[3] = std::nan("");
  CHECK_THROWS_AS(encoder.encode(v, ctx->default_scale(), 1), hrf::EncodingRangeError);
  std::vector<double> too_long(ctx->slot_count() + 1, 0.0);
  CHECK_THROWS_AS(encoder.encode(too_long, ctx->default_scale(), 1), hrf::DimensionError);
}

TEST_CASE("galois permutation agrees with the coefficient automorphism") {
  auto ctx = small_context(5, 1);
  const std::size_t n = ctx->degree();
  const Modulus& q = ctx->modulus(0);
  std::mt19937_64 rng(8);
  std::vector<u64> a(n);
  for (auto& x : a) x = rng() % q.value();
  for (std::size_t steps : {1u, 3u, 7u}) {
    const u64 g = ctx->galois_element(steps);
    std::vector<u64> auto_a(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t e = (i * g) % (2 * n);
      if (e < n) auto_a[e] = a[i];
      else auto_a[e - n] = q.neg(a[i]);
    }
    auto fa = a;
    ctx->ntt(0).forward(fa);
    ctx->ntt(0).forward(auto_a);
    const auto perm = ctx->galois_ntt_permutation(g);
    for (std::size_t i = 0; i < n; ++i) CHECK(auto_a[i] == fa[perm[i]]);
  }
}

TEST_CASE("encrypt and decrypt") {
  Fixture f;
  const auto z = random_values(f.ctx->slot_count(), -10, 10, 1);
  const auto ct = f.encrypt(z);
  CHECK(ct.key_id == f.keys.id);
  CHECK(max_abs_diff(f.decrypt(ct), z, z.size()) < 1e-6);
}

TEST_CASE("homomorphic arithmetic") {
  Fixture f;
  const std::size_t n = f.ctx->slot_count();
  const auto x = random_values(n, -2, 2, 2);
  const auto y = random_values(n, -2, 2, 3);
  const auto cx = f.encrypt(x);
  const auto cy = f.encrypt(y);

  std::vector<double> sum(n), diff(n), prod(n), pprod(n), neg(n);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] = x[i] + y[i];
    diff[i] = x[i] - y[i];
    prod[i] = x[i] * y[i];
    pprod[i] = x[i] * y[i];
    neg[i] = -x[i];
  }
  CHECK(max_abs_diff(f.decrypt(f.eval.add(cx, cy)), sum, n) < 1e-6);
  CHECK(max_abs_diff(f.decrypt(f.eval.sub(cx, cy)), diff, n) < 1e-6);
  CHECK(max_abs_diff(f.decrypt(f.eval.negate(cx)), neg, n) < 1e-6);

  auto cp = f.eval.rescale(f.eval.relinearize(f.eval.multiply(cx, cy), f.keys.relin));
  CHECK(cp.level == f.ctx->max_level() - 1);
  CHECK(cp.size() == 2);
  CHECK(max_abs_diff(f.decrypt(cp), prod, n) < 1e-5);

  const auto py = f.encoder.encode(y, f.ctx->default_scale(), f.ctx->max_level());
  auto cpp = f.eval.rescale(f.eval.multiply_plain(cx, py));
  CHECK(max_abs_diff(f.decrypt(cpp), pprod, n) < 1e-5);

  // Chain products down to level 0.
  auto c = cx;
  std::vector<double> expect = x;
  for (int l = f.ctx->max_level(); l > 0; --l) {
    c = f.eval.rescale(f.eval.relinearize(f.eval.multiply(c, f.eval.drop_to_level(cy, c.level)), f.keys.relin));
    for (std::size_t i = 0; i < n; ++i) expect[i] *= y[i];
  }
  CHECK(c.level == 0);
  CHECK(max_abs_diff(f.decrypt(c), expect, n) < 1e-4);
  CHECK_THROWS_AS(f.eval.rescale(c), hrf::DepthBudgetError);
}

TEST_CASE("rotation shifts slots to the left") {
  Fixture f;
  const std::size_t n = f.ctx->slot_count();
  const auto z = random_values(n, -5, 5, 4);
  const auto ct = f.encrypt(z);
  for (std::size_t r : {1u, 3u, 8u}) {
    std::vector<double> expect(n);
    for (std::size_t i = 0; i < n; ++i) expect[i] = z[(i + r) % n];
    CHECK(max_abs_diff(f.decrypt(f.eval.rotate(ct, r, f.keys.galois)), expect, n) < 1e-6);
  }
  CHECK_THROWS_AS(f.eval.rotate(ct, 5, f.keys.galois), hrf::KeyError);
}

TEST_CASE("ciphertexts under different keys do not mix") {
  Fixture f;
  auto ctx = f.ctx;
  KeyGenerator other(ctx, 8);
  Encryptor enc2(ctx, other.create_public_key(), other.key_id(), 1);
  const std::vector<double> v(4, 1.0);
  const auto a = f.encrypt(v);
  const auto b = enc2.encrypt(f.encoder.encode(v, ctx->default_scale(), ctx->max_level()));
  CHECK(a.key_id != b.key_id);
  CHECK_THROWS_AS(f.eval.add(a, b), hrf::KeyMismatchError);
}

TEST_CASE("level mismatch is rejected") {
  Fixture f;
  const std::vector<double> v(4, 1.0);
  const auto a = f.encrypt(v);
  const auto b = f.encrypt(v, 1);
  CHECK_THROWS_AS(f.eval.add(a, b), hrf::AlignmentError);
}

TEST_CASE("key generation is deterministic") {
  auto ctx = small_context();
  KeyGenerator a(ctx, 42), b(ctx, 42);
  CHECK(a.key_id() == b.key_id());
  CHECK(a.secret_key().poly == b.secret_key().poly);
}

TEST_CASE("serialization round trips") {
  Fixture f;
  const auto z = random_values(f.ctx->slot_count(), -1, 1, 6);
  std::vector<Ciphertext> cts{f.encrypt(z), f.encrypt(z, 1)};

  std::stringstream ss;
  write_ciphertexts(ss, *f.ctx, cts);
  const auto header = read_header(ss);
  CHECK(header.kind == BlobKind::kCiphertexts);
  CHECK(header.params.log_degree == f.ctx->params().log_degree);
  CHECK(header.params.depth == f.ctx->params().depth);
  CHECK(header.moduli == f.ctx->chain_values());
  ss.seekg(0);
  const auto back = read_ciphertexts(ss, *f.ctx);
  REQUIRE(back.size() == 2);
  CHECK(back[1].level == 1);
  CHECK(back[0].parts[0] == cts[0].parts[0]);
  CHECK(max_abs_diff(f.decrypt(back[1]), z, z.size()) < 1e-6);

  std::stringstream gk;
  write_galois_keys(gk, *f.ctx, f.keys.galois, f.keys.id);
  std::uint64_t id = 0;
  const auto galois = read_galois_keys(gk, *f.ctx, &id);
  CHECK(id == f.keys.id);
  CHECK(galois.steps == f.keys.galois.steps);
  std::vector<double> expect(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) expect[i] = z[(i + 2) % z.size()];
  CHECK(max_abs_diff(f.decrypt(f.eval.rotate(cts[0], 2, galois)), expect, z.size()) < 1e-6);

  std::stringstream sk;
  write_secret_key(sk, *f.ctx, f.keys.secret, f.keys.id);
  CHECK_THROWS_AS(read_public_key(sk, *f.ctx), hrf::FormatError);

  std::stringstream junk("not a blob");
  CHECK_THROWS_AS(read_header(junk), hrf::FormatError);

  auto other = small_context(6, 3);
  std::stringstream ss2;
  write_ciphertexts(ss2, *f.ctx, cts);
  CHECK_THROWS_AS(read_ciphertexts(ss2, *other), hrf::FormatError);
}
