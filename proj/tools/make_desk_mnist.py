#!/usr/bin/env python3
# Copyright 2026 The EqSpike Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the desk-scale MNIST subset shipped in data/mnist-desk.

The source is the `mnist` npm package (10,000 MNIST digits stored as
per-class JSON arrays of intensities rounded to 3 decimals). Intensities are
mapped back to bytes, shuffled with a fixed seed and split into disjoint
train/test IDX files.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_desk_mnist.py package/src/digits data/mnist-desk
"""

import argparse
import json
import pathlib
import struct

import numpy as np


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("digits_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--train-n", type=int, default=5000)
    parser.add_argument("--test-n", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=20210101)
    args = parser.parse_args()

    images, labels = [], []
    for digit in range(10):
        raw = json.loads((args.digits_dir / f"{digit}.json").read_text())["data"]
        block = np.rint(np.asarray(raw, dtype=np.float64).reshape(-1, 784) * 255.0)
        images.append(block)
        labels.append(np.full(len(block), digit))
    images = np.concatenate(images)
    labels = np.concatenate(labels)

    order = np.random.default_rng(args.seed).permutation(len(labels))
    train = order[: args.train_n]
    test = order[args.train_n : args.train_n + args.test_n]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx_images(args.out_dir / "train-images-idx3-ubyte", images[train])
    write_idx_labels(args.out_dir / "train-labels-idx1-ubyte", labels[train])
    write_idx_images(args.out_dir / "t10k-images-idx3-ubyte", images[test])
    write_idx_labels(args.out_dir / "t10k-labels-idx1-ubyte", labels[test])


if __name__ == "__main__":
    main()
