// Copyright 2026 The dlc Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dlc/model.hpp"

namespace dlc {

struct Dataset {
  Tensor x;  // m x d, values in [0, 1]
  std::vector<std::size_t> y;
  std::size_t classes = 0;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return x.cols(); }
};

/// Gaussian clusters around centres drawn uniformly from [0.2, 0.8]^dim,
/// clipped to [0, 1].
struct BlobsSpec {
  std::size_t classes = 3;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 100;
  std::size_t dim = 2;
  double spread = 0.05;
  std::uint64_t seed = 7;
};

struct DataSource {
  std::string kind = "blobs";  // blobs | csv | idx
  BlobsSpec blobs;
  std::string train_csv, test_csv;
  std::string train_images, train_labels, test_images, test_labels;
  /// Declared class count for file sources; 0 infers max label + 1.
  std::size_t classes = 0;
};

std::pair<Dataset, Dataset> make_blobs(const BlobsSpec& spec);

/// Header "label,f0,f1,..."; one sample per line. Inputs outside [0, 1] are
/// min-max rescaled over the whole file. Throws FormatError.
Dataset load_csv(const std::string& path, std::size_t classes = 0);
void save_csv(const Dataset& data, const std::string& path);

/// Big-endian IDX pair: images (magic 2051, u8 pixels scaled by 1/255) and
/// labels (magic 2049). Throws FormatError.
Dataset load_idx(const std::string& images, const std::string& labels, std::size_t classes = 0);

std::pair<Dataset, Dataset> load_dataset(const DataSource& source);

/// Classes with one group per consecutive pair: {0,1}, {2,3}, ...
std::vector<std::pair<std::string, std::vector<std::size_t>>> default_groups(std::size_t classes);

struct Triple {
  std::size_t a, b, c;  // a is more similar to b than to c
};
/// For each class a: b = nearest other centroid, c = farthest.
std::vector<Triple> centroid_triples(const Dataset& data);

}  // namespace dlc
