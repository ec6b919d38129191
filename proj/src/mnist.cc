// Copyright 2026 The EqSpike Authors
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

#include "eqspike/mnist.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "eqspike/error.h"

namespace eqspike {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<std::uint8_t> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t BigEndian32(const std::vector<std::uint8_t>& bytes, size_t at) {
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

void PutBigEndian32(std::ofstream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                 static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), b.size());
}

void Expect(bool ok, ErrorKind kind, const std::filesystem::path& path,
            const std::string& what) {
  if (!ok) throw Error(kind, path.string() + ": " + what);
}

std::filesystem::path FindFile(const std::filesystem::path& dir,
                               const std::string& stem, const std::string& kind) {
  for (const std::string& name : {stem + "-" + kind, stem + "." + kind}) {
    if (std::filesystem::exists(dir / name)) return dir / name;
  }
  throw Error(ErrorKind::kIo, "no " + stem + " " + kind + " file in " + dir.string());
}

}  // namespace

IdxImages ReadIdxImages(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadAll(path);
  Expect(bytes.size() >= 4, ErrorKind::kTruncated, path, "missing header");
  Expect(BigEndian32(bytes, 0) == kImageMagic, ErrorKind::kBadMagic, path,
         "image magic must be 2051, got " + std::to_string(BigEndian32(bytes, 0)));
  Expect(bytes.size() >= 16, ErrorKind::kTruncated, path, "missing header");
  IdxImages out;
  out.count = static_cast<int>(BigEndian32(bytes, 4));
  out.rows = static_cast<int>(BigEndian32(bytes, 8));
  out.cols = static_cast<int>(BigEndian32(bytes, 12));
  const size_t n = static_cast<size_t>(out.count) * out.rows * out.cols;
  Expect(bytes.size() >= 16 + n, ErrorKind::kTruncated, path,
         "expected " + std::to_string(n) + " pixel bytes");
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(n));
  return out;
}

std::vector<std::uint8_t> ReadIdxLabels(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadAll(path);
  Expect(bytes.size() >= 4, ErrorKind::kTruncated, path, "missing header");
  Expect(BigEndian32(bytes, 0) == kLabelMagic, ErrorKind::kBadMagic, path,
         "label magic must be 2049, got " + std::to_string(BigEndian32(bytes, 0)));
  Expect(bytes.size() >= 8, ErrorKind::kTruncated, path, "missing header");
  const size_t n = BigEndian32(bytes, 4);
  Expect(bytes.size() >= 8 + n, ErrorKind::kTruncated, path,
         "expected " + std::to_string(n) + " labels");
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<long>(n)};
}

Dataset LoadIdxPair(const std::filesystem::path& images,
                    const std::filesystem::path& labels, Split split, int limit) {
  const IdxImages raw = ReadIdxImages(images);
  std::vector<std::uint8_t> lab = ReadIdxLabels(labels);
  if (static_cast<int>(lab.size()) != raw.count) {
    throw Error(ErrorKind::kCountMismatch,
                images.string() + " holds " + std::to_string(raw.count) +
                    " images but " + labels.string() + " holds " +
                    std::to_string(lab.size()) + " labels");
  }
  for (std::uint8_t l : lab) {
    if (l > 9) throw Error(ErrorKind::kParse, labels.string() + ": label out of range");
  }
  Dataset ds;
  ds.split = split;
  ds.pixels = raw.rows * raw.cols;
  const int keep = (limit > 0 && limit < raw.count) ? limit : raw.count;
  ds.labels.assign(lab.begin(), lab.begin() + keep);
  ds.images.resize(static_cast<size_t>(keep) * ds.pixels);
  std::transform(raw.pixels.begin(), raw.pixels.begin() + static_cast<long>(ds.images.size()),
                 ds.images.begin(), [](std::uint8_t p) { return p / 255.0f; });
  return ds;
}

Dataset LoadMnist(const std::filesystem::path& dir, Split split, int limit) {
  const std::string stem = split == Split::kTrain ? "train" : "t10k";
  return LoadIdxPair(FindFile(dir, stem + "-images", "idx3-ubyte"),
                     FindFile(dir, stem + "-labels", "idx1-ubyte"), split, limit);
}

Dataset Dataset::Head(int n) const {
  if (n <= 0 || n >= size()) return *this;
  Dataset out;
  out.split = split;
  out.pixels = pixels;
  out.labels.assign(labels.begin(), labels.begin() + n);
  out.images.assign(images.begin(), images.begin() + static_cast<long>(n) * pixels);
  return out;
}

void WriteIdxImages(const std::filesystem::path& path, const IdxImages& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  PutBigEndian32(out, kImageMagic);
  PutBigEndian32(out, static_cast<std::uint32_t>(images.count));
  PutBigEndian32(out, static_cast<std::uint32_t>(images.rows));
  PutBigEndian32(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
}

void WriteIdxLabels(const std::filesystem::path& path,
                    std::span<const std::uint8_t> labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  PutBigEndian32(out, kLabelMagic);
  PutBigEndian32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

std::vector<double> EncodeImage(std::span<const float> image, double max_current) {
  std::vector<double> currents(image.size());
  std::transform(image.begin(), image.end(), currents.begin(),
                 [max_current](float x) { return static_cast<double>(x) * max_current; });
  return currents;
}

}  // namespace eqspike
