#!/usr/bin/env python3
# Copyright 2026 The Taxoforge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a label,v0..vN embedding table from character trigram hashes.

Good enough to exercise similarity gates offline; not a semantic model.
"""

import argparse
import csv
import hashlib
import sys


def embed(label, dim):
    text = "#" + " ".join(label.lower().split()) + "#"
    vec = [0.0] * dim
    for i in range(len(text) - 2):
        digest = hashlib.md5(text[i:i + 3].encode("utf-8")).digest()
        slot = int.from_bytes(digest[:4], "little") % dim
        sign = 1.0 if digest[4] & 1 else -1.0
        vec[slot] += sign
    return vec


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("labels", help="file with one label per line")
    parser.add_argument("--dim", type=int, default=64)
    args = parser.parse_args()
    with open(args.labels, encoding="utf-8") as fh:
        labels = [line.strip() for line in fh if line.strip()]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["label"] + ["d%d" % i for i in range(args.dim)])
    for label in sorted(set(labels)):
        out.writerow([label] + ["%.6f" % x for x in embed(label, args.dim)])


if __name__ == "__main__":
    main()
