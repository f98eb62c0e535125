// Copyright 2026 The dimred Authors
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

#ifndef DIMRED_RANDOM_H_
#define DIMRED_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dimred {

// SplitMix64 finalizer. Used to derive independent seeds from a master seed.
std::uint64_t Mix64(std::uint64_t x);

// Seed for the `index`-th child stream of `master`.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Seeded generator whose outputs are identical on every platform. The
// standard distributions are implementation-defined, so the bounded-integer
// and real draws are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t UniformIndex(std::uint64_t bound);

  // Uniform real in [0, 1).
  double UniformReal();

  bool Bernoulli(double p) { return UniformReal() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dimred

#endif  // DIMRED_RANDOM_H_
