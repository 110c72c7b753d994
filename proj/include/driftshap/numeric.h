/*
 * Copyright 2026 The driftshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DRIFTSHAP_NUMERIC_H_
#define DRIFTSHAP_NUMERIC_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace driftshap {

std::uint64_t SplitMix64(std::uint64_t x);

// Counter-based seed derivation: independent streams from one user seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Deterministic random source. Only the raw 64-bit engine output is used, so
// draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  double Uniform(double low, double high);
  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();
  // Inverse-CDF draw from a discrete distribution (need not be normalized).
  std::size_t Categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// Correctly rounded floating-point sum (Shewchuk partials). The result is
// independent of summation order and exactly odd: summing negated terms gives
// the negated result.
class ExactSum {
 public:
  void Add(double x);
  double Value() const;

 private:
  std::vector<double> partials_;
};

double SumExact(std::span<const double> values);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

// Strict full-string parse; returns false on any trailing garbage.
bool ParseDouble(const std::string& text, double* out);

}  // namespace driftshap

#endif  // DRIFTSHAP_NUMERIC_H_
