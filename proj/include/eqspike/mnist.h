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

#ifndef EQSPIKE_MNIST_H_
#define EQSPIKE_MNIST_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eqspike {

enum class Split { kTrain, kTest };

// Images stored row-major, one `pixels`-long slice per sample, intensities in
// [0, 1] (raw bytes divided by 255).
struct Dataset {
  Split split = Split::kTrain;
  int pixels = 0;
  std::vector<float> images;
  std::vector<std::uint8_t> labels;

  int size() const { return static_cast<int>(labels.size()); }
  std::span<const float> image(int index) const {
    return {images.data() + static_cast<size_t>(index) * pixels,
            static_cast<size_t>(pixels)};
  }
  // First `n` samples (all of them if n <= 0 or n >= size()).
  Dataset Head(int n) const;
};

// Raw IDX readers. Image files must carry magic 2051 (ubyte, 3 dims) and label
// files magic 2049 (ubyte, 1 dim); dimensions are big-endian. Errors:
// kIo (cannot open), kBadMagic, kTruncated.
struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;
};
IdxImages ReadIdxImages(const std::filesystem::path& path);
std::vector<std::uint8_t> ReadIdxLabels(const std::filesystem::path& path);

// Parses an image/label file pair into a normalised dataset; a count mismatch
// between the files raises kCountMismatch. `limit` > 0 keeps the first `limit`
// samples.
Dataset LoadIdxPair(const std::filesystem::path& images,
                    const std::filesystem::path& labels, Split split, int limit = 0);

// Loads train-{images,labels} or t10k-{images,labels} from `dir`, accepting
// both the "-idx3-ubyte" and ".idx3-ubyte" spellings.
Dataset LoadMnist(const std::filesystem::path& dir, Split split, int limit = 0);

void WriteIdxImages(const std::filesystem::path& path, const IdxImages& images);
void WriteIdxLabels(const std::filesystem::path& path,
                    std::span<const std::uint8_t> labels);

// Linear map of intensities in [0, 1] to clamped currents in [0, max_current].
std::vector<double> EncodeImage(std::span<const float> image, double max_current);

}  // namespace eqspike

#endif  // EQSPIKE_MNIST_H_
