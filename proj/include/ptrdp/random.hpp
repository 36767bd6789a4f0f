//
// Copyright 2026 The ptr-accountant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PTRDP_RANDOM_HPP_
#define PTRDP_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace ptrdp {

// Deterministic random stream: a fixed seed plus a fixed call sequence always
// reproduces the same samples, independent of platform library internals.
// All transforms (uniform, Laplace, Gaussian) are implemented here rather
// than delegated to std:: distributions, whose output is not pinned by the
// standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on the open interval (0, 1).
  double uniform() {
    const std::uint64_t bits = gen_();
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Derives an independent stream from the base seed; state of this generator
  // is not consumed, so forks are stable under reordering.
  Rng fork(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace ptrdp

#endif  // PTRDP_RANDOM_HPP_
