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

#include "dlc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "dlc/error.hpp"

namespace dlc {

namespace {

std::size_t infer_classes(const std::vector<std::size_t>& y, std::size_t declared, const std::string& where) {
  std::size_t top = 0;
  for (std::size_t v : y) top = std::max(top, v + 1);
  if (declared == 0) return std::max<std::size_t>(top, 2);
  if (top > declared) throw FormatError(where + ": label " + std::to_string(top - 1) + " exceeds class count");
  return declared;
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

}  // namespace

std::pair<Dataset, Dataset> make_blobs(const BlobsSpec& spec) {
  if (spec.classes < 2 || spec.dim == 0 || spec.train_per_class == 0) {
    throw DomainError("blobs: need at least 2 classes, dim > 0 and train_per_class > 0");
  }
  if (!(spec.spread > 0.0)) throw DomainError("blobs: spread must be positive");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> centre(0.2, 0.8);
  std::normal_distribution<double> noise(0.0, spec.spread);
  std::vector<double> centres(spec.classes * spec.dim);
  for (double& c : centres) c = centre(rng);
  auto draw = [&](std::size_t per_class) {
    Dataset d;
    d.classes = spec.classes;
    d.x = Tensor({per_class * spec.classes, spec.dim});
    std::size_t row = 0;
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t k = 0; k < spec.classes; ++k, ++row) {
        for (std::size_t j = 0; j < spec.dim; ++j) {
          d.x.at(row, j) = std::clamp(centres[k * spec.dim + j] + noise(rng), 0.0, 1.0);
        }
        d.y.push_back(k);
      }
    }
    return d;
  };
  Dataset train = draw(spec.train_per_class);
  Dataset test = draw(spec.test_per_class);
  return {std::move(train), std::move(test)};
}

Dataset load_csv(const std::string& path, std::size_t classes) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "label") throw FormatError("csv: header must be label,f0,f1,...");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "f" + std::to_string(j - 1)) throw FormatError("csv: header column " + std::to_string(j) + " must be f" + std::to_string(j - 1));
  }
  const std::size_t dim = header.size() - 1;
  std::vector<double> values;
  std::vector<std::size_t> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "csv: " + path + ":" + std::to_string(lineno);
    std::size_t col = 0, start = 0;
    for (;;) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      const char* b = line.data() + start;
      const char* e = line.data() + end;
      if (col == 0) {
        std::size_t label = 0;
        auto [p, ec] = std::from_chars(b, e, label);
        if (ec != std::errc() || p != e) throw FormatError(where + ": bad label");
        labels.push_back(label);
      } else {
        double v = 0.0;
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || !std::isfinite(v)) throw FormatError(where + ": bad value");
        values.push_back(v);
      }
      ++col;
      if (end == line.size()) break;
      start = end + 1;
    }
    if (col != dim + 1) throw FormatError(where + ": expected " + std::to_string(dim + 1) + " fields");
  }
  if (labels.empty()) throw FormatError("csv: '" + path + "' has no samples");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo < 0.0 || *hi > 1.0) {
    const double a = *lo, span = *hi - *lo;
    for (double& v : values) v = span > 0.0 ? (v - a) / span : 0.0;
  }
  Dataset d;
  d.classes = infer_classes(labels, classes, "csv: " + path);
  d.x = Tensor({labels.size(), dim}, std::move(values));
  d.y = std::move(labels);
  return d;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("csv: cannot open '" + path + "' for writing");
  out << "label";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.y[i];
    for (double v : data.x.row(i)) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(p - buf));
    }
    out << '\n';
  }
}

Dataset load_idx(const std::string& images, const std::string& labels, std::size_t classes) {
  const std::vector<unsigned char> img = read_file(images);
  const std::vector<unsigned char> lab = read_file(labels);
  if (img.size() < 16 || be32(img, 0) != 2051) throw FormatError("idx: '" + images + "' is not an image file");
  if (lab.size() < 8 || be32(lab, 0) != 2049) throw FormatError("idx: '" + labels + "' is not a label file");
  const std::size_t count = be32(img, 4), rows = be32(img, 8), cols = be32(img, 12);
  if (be32(lab, 4) != count) throw FormatError("idx: image and label counts differ");
  const std::size_t dim = rows * cols;
  if (dim == 0 || img.size() != 16 + count * dim) throw FormatError("idx: image payload size mismatch");
  if (lab.size() != 8 + count) throw FormatError("idx: label payload size mismatch");
  Dataset d;
  d.x = Tensor({count, dim});
  for (std::size_t i = 0; i < count * dim; ++i) d.x.data[i] = img[16 + i] / 255.0;
  d.y.resize(count);
  for (std::size_t i = 0; i < count; ++i) d.y[i] = lab[8 + i];
  d.classes = infer_classes(d.y, classes, "idx: " + labels);
  return d;
}

std::pair<Dataset, Dataset> load_dataset(const DataSource& source) {
  if (source.kind == "blobs") return make_blobs(source.blobs);
  if (source.kind == "csv") {
    Dataset train = load_csv(source.train_csv, source.classes);
    Dataset test = load_csv(source.test_csv, source.classes == 0 ? train.classes : source.classes);
    if (test.dim() != train.dim()) throw FormatError("csv: train and test widths differ");
    test.classes = train.classes = std::max(train.classes, test.classes);
    return {std::move(train), std::move(test)};
  }
  if (source.kind == "idx") {
    Dataset train = load_idx(source.train_images, source.train_labels, source.classes);
    Dataset test = load_idx(source.test_images, source.test_labels, source.classes == 0 ? train.classes : source.classes);
    if (test.dim() != train.dim()) throw FormatError("idx: train and test widths differ");
    test.classes = train.classes = std::max(train.classes, test.classes);
    return {std::move(train), std::move(test)};
  }
  throw FormatError("unknown dataset kind '" + source.kind + "'");
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> default_groups(std::size_t classes) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t k = 0; k < classes; k += 2) {
    std::vector<std::size_t> members{k};
    if (k + 1 < classes) members.push_back(k + 1);
    groups.emplace_back("g" + std::to_string(groups.size()), std::move(members));
  }
  return groups;
}

std::vector<Triple> centroid_triples(const Dataset& data) {
  const std::size_t n = data.classes, d = data.dim();
  if (n < 3) throw DomainError("class similarity needs at least 3 classes");
  std::vector<double> c(n * d, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++count[data.y[i]];
    for (std::size_t j = 0; j < d; ++j) c[data.y[i] * d + j] += data.x.at(i, j);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) c[k * d + j] /= static_cast<double>(std::max<std::size_t>(1, count[k]));
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (c[a * d + j] - c[b * d + j]) * (c[a * d + j] - c[b * d + j]);
    return s;
  };
  std::vector<Triple> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t near = a, far = a;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == a) continue;
      if (near == a || dist(a, k) < dist(a, near)) near = k;
      if (far == a || dist(a, k) > dist(a, far)) far = k;
    }
    out.push_back({a, near, far});
  }
  return out;
}

}  // namespace dlc
