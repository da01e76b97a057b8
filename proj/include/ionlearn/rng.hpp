// Copyright 2026 The ionlearn Authors.
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

#ifndef IONLEARN_RNG_HPP
#define IONLEARN_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ionlearn {

/// Portable counter-based generator.
///
/// The n-th raw output (n = 1, 2, ...) is mix(seed + n * 0x9E3779B97F4A7C15)
/// where mix is the SplitMix64 finalizer:
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// uniform() takes the top 53 bits scaled by 2^-53, so it lies in [0, 1).
/// normal() uses the Box-Muller cosine branch on two consecutive uniforms
/// (u1 mapped to (0, 1] as 1 - u1) and does not cache the sine branch, so
/// every call consumes exactly two raw outputs. Index draws use the high
/// half of a 64x64 -> 128 bit product. None of this depends on the
/// standard library's distributions, whose outputs are implementation
/// defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  // Uniform in [0, n); n must be positive.
  std::size_t index(std::size_t n) noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace ionlearn

#endif  // IONLEARN_RNG_HPP
