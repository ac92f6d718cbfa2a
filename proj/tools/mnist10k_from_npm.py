#!/usr/bin/env python3
"""Rebuild data/mnist10k/*.gz from the `mnist` npm package (10,000 MNIST digits).

The package stores each digit as 784 grayscale values rounded to three
decimals; multiplying by 255 and rounding recovers the original bytes.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist10k_from_npm.py package/src/digits data/mnist10k
"""
import gzip
import json
import struct
import sys
from pathlib import Path

import numpy as np


def main(src: Path, dst: Path) -> None:
    images, labels = [], []
    for digit in range(10):
        data = np.asarray(json.loads((src / f"{digit}.json").read_text())["data"])
        pixels = np.rint(data * 255.0).astype(np.uint8).reshape(-1, 784)
        images.append(pixels)
        labels.append(np.full(len(pixels), digit, dtype=np.uint8))
    images = np.concatenate(images)
    labels = np.concatenate(labels)
    order = np.random.default_rng(0).permutation(len(labels))
    images, labels = images[order], labels[order]

    dst.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(dst / "mnist10k-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        f.write(images.tobytes())
    with gzip.GzipFile(dst / "mnist10k-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.tobytes())


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(Path(sys.argv[1]), Path(sys.argv[2]))
