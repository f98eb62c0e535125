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

#ifndef DIMRED_TESTS_TEST_UTIL_H_
#define DIMRED_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "dimred/dataset.h"
#include "dimred/random.h"

namespace dimred::testing {

inline std::vector<std::string> Names(int n, const std::string& prefix = "f") {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

inline std::vector<std::string> ClassNames(int c) {
  std::vector<std::string> names;
  for (int i = 0; i < c; ++i) names.push_back(std::to_string(i));
  return names;
}

// rows: feature values; labels: class indices.
inline QuantizedDataset MakeData(const std::vector<std::vector<int>>& rows,
                                 const std::vector<int>& labels,
                                 std::vector<int> alphabets = {}, int classes = 0) {
  const int nf = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  Matrix<int> m(static_cast<int>(rows.size()), nf);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < nf; ++j) m(static_cast<int>(i), j) = rows[i][j];
  }
  if (alphabets.empty()) {
    alphabets.assign(nf, 2);
    for (const auto& r : rows) {
      for (int j = 0; j < nf; ++j) alphabets[j] = std::max(alphabets[j], r[j] + 1);
    }
  }
  if (classes == 0) {
    for (int l : labels) classes = std::max(classes, l + 1);
  }
  return QuantizedDataset(Names(nf), std::move(m), std::move(alphabets), labels,
                          ClassNames(classes));
}

// Uniform random discrete data; every class index 0..c-1 occurs at least once.
inline QuantizedDataset RandomData(Rng& rng, int features, int samples, int classes,
                                   int max_alphabet = 3) {
  std::vector<int> alphabets(features);
  for (int& a : alphabets) a = 2 + static_cast<int>(rng.UniformIndex(max_alphabet - 1));
  Matrix<int> m(samples, features);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < features; ++j) {
      m(i, j) = static_cast<int>(rng.UniformIndex(alphabets[j]));
    }
  }
  std::vector<int> labels(samples);
  for (int& l : labels) l = static_cast<int>(rng.UniformIndex(classes));
  for (int c = 0; c < classes && c < samples; ++c) labels[c] = c;
  return QuantizedDataset(Names(features), std::move(m), std::move(alphabets),
                          std::move(labels), ClassNames(classes));
}

// Y = x0 xor x1; x2 agrees with Y on 3 of every 4 copies. x0 and x1 are
// individually uninformative, so greedy forward selection starts with x2.
inline QuantizedDataset XorData() {
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int y = a ^ b;
      for (int copy = 0; copy < 4; ++copy) {
        rows.push_back({a, b, copy == 0 ? 1 - y : y});
        labels.push_back(y);
      }
    }
  }
  return MakeData(rows, labels);
}

}  // namespace dimred::testing

#endif  // DIMRED_TESTS_TEST_UTIL_H_
