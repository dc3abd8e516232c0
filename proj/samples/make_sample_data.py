#!/usr/bin/env python3
# Copyright 2026 The tiger-eval Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds the toy sample corpus in samples/data.

Word vectors come from a tiny random vocabulary; every image is a handful of
objects whose region features are noisy copies of the object word vectors.
Good captions name the objects in the image, poor ones name other things.

    python3 samples/make_sample_data.py samples/data
"""

import json
import pathlib
import re
import struct
import sys

import numpy as np

DIM = 16
VOCAB = ["a", "the", "on", "in", "with", "of", "and", "is",
         "dog", "cat", "ball", "grass", "man", "woman", "bike", "street",
         "car", "tree", "table", "cake", "boat", "water", "kite", "sky",
         "plays", "rides", "sits", "flies", "over", "red", "small", "big", "green"]

IMAGES = {
    "img1": ["dog", "ball", "grass"],
    "img2": ["man", "bike", "street"],
    "img3": ["cat", "table", "cake"],
    "img4": ["boat", "water", "sky"],
    "img5": ["woman", "kite", "sky", "grass"],
    "img6": ["car", "tree", "street"],
}

REFERENCES = {
    "img1": ["a dog plays with a ball on the grass", "the dog and a red ball",
             "a small dog on green grass", "dog plays with the ball",
             "a big dog with a ball in the grass"],
    "img2": ["a man rides a bike on the street", "the man on a bike",
             "a man rides in the street", "man with a bike on a street",
             "a man and a red bike"],
    "img3": ["a cat sits on the table with a cake", "the cat and a cake",
             "a small cat on a table", "cat sits with the cake",
             "a cake on the table and a cat"],
    "img4": ["a boat on the water", "the small boat on water and sky",
             "a boat in the water", "a red boat on the water",
             "boat on the water with the sky"],
    "img5": ["a woman flies a kite in the sky", "the woman and a kite",
             "a kite in the sky over the grass", "woman flies the kite",
             "a woman on the grass with a kite"],
    "img6": ["a car on the street with a tree", "the car and a tree",
             "a green car on a street", "a car in the street",
             "a tree and a red car on the street"],
}

# (caption, human score 1..5) per image.
CANDIDATES = {
    "img1": [("a dog plays with a ball", 5), ("a dog on the grass", 4),
             ("a cat on the grass", 2), ("a man rides a bike", 1)],
    "img2": [("a man rides a bike on a street", 5), ("a man on the street", 4),
             ("a woman with a kite", 1), ("a man with a car", 3)],
    "img3": [("a cat sits with a cake", 5), ("a cat on the table", 4),
             ("a dog on the table", 2), ("a boat on the water", 1)],
    "img4": [("a boat on the water", 5), ("the water and the sky", 3),
             ("a car on the water", 2), ("a cake on the table", 1)],
    "img5": [("a woman flies a kite", 5), ("a kite in the sky", 4),
             ("a man flies a kite", 3), ("a dog with a ball", 1)],
    "img6": [("a car on the street", 5), ("a tree and a car", 4),
             ("a bike on the street", 3), ("a cat with a cake", 1)],
}


def tokens(text):
    return re.findall(r"[a-z]+", text.lower())


def write_tfv1(path, array):
    array = np.ascontiguousarray(array, dtype="<f4")
    header = b"TFV1" + struct.pack("<HB", 1, array.ndim)
    header += b"".join(struct.pack("<I", d) for d in array.shape)
    path.write_bytes(header + array.tobytes())


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "samples/data")
    (root / "regions").mkdir(parents=True, exist_ok=True)
    (root / "words").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    embed = {w: rng.normal(size=DIM) for w in VOCAB}
    manifest = {"d": DIM, "regions": {}, "words": {}}

    def add_caption(cid, text):
        write_tfv1(root / "words" / f"{cid}.tfv", np.stack([embed[t] for t in tokens(text)]))
        manifest["words"][cid] = f"words/{cid}.tfv"
        return {"id": cid, "text": text}

    scored, pairs = [], []
    for image, objects in IMAGES.items():
        regions = np.stack([embed[o] + rng.normal(scale=0.35, size=DIM) for o in objects]
                           + [rng.normal(size=DIM)])
        write_tfv1(root / "regions" / f"{image}.tfv", regions)
        manifest["regions"][image] = f"regions/{image}.tfv"
        refs = [add_caption(f"{image}_r{k}", t) for k, t in enumerate(REFERENCES[image])]
        cands = []
        for k, (text, score) in enumerate(CANDIDATES[image]):
            cand = add_caption(f"{image}_c{k}", text)
            cands.append((cand, score))
            scored.append({"image_id": image, "candidate": cand, "references": refs,
                           "human_score": score, "scale": {"min": 1, "max": 5}})
        kinds = ["HC", "HI", "HM", "MM"]
        for k, ((a, sa), (b, sb)) in enumerate([(cands[0], cands[1]), (cands[0], cands[3]),
                                                (cands[1], cands[2]), (cands[2], cands[3])]):
            pairs.append({"image_id": image, "candidate_a": a, "candidate_b": b,
                          "human_choice": "A" if sa >= sb else "B",
                          "pair_type": kinds[k], "references": refs})

    (root / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    with open(root / "scored.jsonl", "w") as f:
        for rec in scored:
            f.write(json.dumps(rec) + "\n")
    with open(root / "pairs.jsonl", "w") as f:
        for rec in pairs:
            f.write(json.dumps(rec) + "\n")
    print(f"wrote {len(scored)} scored records and {len(pairs)} pairs to {root}")


if __name__ == "__main__":
    main()
