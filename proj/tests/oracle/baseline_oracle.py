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

"""Expected BLEU-1/4, ROUGE-L and CIDEr values for the baseline micro fixtures.

Captions are pre-tokenized (space-separated). Counts are exact; logs and
square roots use mpmath at 40 digits.

    python3 tests/oracle/baseline_oracle.py > tests/data/baselines.json
"""

import json
from collections import Counter
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40

# name, candidate, references, other reference sets in the idf corpus
FIXTURES = [
    ("half_unigram", "a b", ["a c"], [["x y"]]),
    ("lcs_two_thirds", "a b c", ["a x c"], [["y z"]]),
    ("self", "a man rides a horse", ["a man rides a horse"], [["dogs play in snow"]]),
    ("brevity", "the cat", ["the cat sat on the mat"], [["a dog"]]),
    ("clipping", "the the the the", ["the cat is on the mat"], [["a dog"]]),
    ("closest_length_tie", "a b c d", ["a b c", "a b c d e"], [["b c d"]]),
    ("no_fourgram", "x a y b", ["a b c d"], [["a b"]]),
    ("long_candidate", "a dog runs fast on the green grass today",
     ["a dog runs on the grass", "the dog is fast"], [["a cat on the grass"], ["dog"]]),
    ("short_candidate", "dog runs", ["a dog runs"], [["dog runs home"]]),
    ("repeated_tokens", "a a b b", ["a b a b"], [["b a"]]),
    ("cider_unique", "red kite over the sea", ["red kite over the sea"],
     [["a man rides a horse"], ["two dogs play"]]),
    ("cider_shared", "a man on a horse", ["a man riding a horse", "a person on a horse"],
     [["a horse in a field"], ["a man with a dog"]]),
    ("disjoint", "x y z", ["a b c"], [["a b"]]),
]


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(cand, refs, max_n):
    c = len(cand)
    orders = min(max_n, c)
    precisions = []
    for n in range(1, orders + 1):
        counts = ngrams(cand, n)
        max_ref = Counter()
        for r in refs:
            for g, k in ngrams(r, n).items():
                max_ref[g] = max(max_ref[g], k)
        clipped = sum(min(k, max_ref[g]) for g, k in counts.items())
        if clipped == 0:
            return mp.mpf(0)
        precisions.append(Fraction(clipped, c - n + 1))
    lengths = sorted(len(r) for r in refs)
    r = min(lengths, key=lambda x: (abs(x - c), x))
    bp = mp.mpf(1) if c >= r else mp.exp(1 - mp.mpf(r) / c)
    geo = mp.exp(mp.fsum(mp.log(mp.mpf(p.numerator) / p.denominator) for p in precisions)
                 / len(precisions))
    return bp * geo


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = (table[i - 1][j - 1] + 1 if a[i - 1] == b[j - 1]
                           else max(table[i - 1][j], table[i][j - 1]))
    return table[-1][-1]


def rouge_l(cand, refs, beta=mp.mpf("1.2")):
    best = mp.mpf(0)
    for r in refs:
        l = lcs(cand, r)
        if l == 0:
            continue
        p = mp.mpf(l) / len(cand)
        rec = mp.mpf(l) / len(r)
        best = max(best, (1 + beta ** 2) * p * rec / (rec + beta ** 2 * p))
    return best


def cider(cand, refs, corpus, sigma=6):
    size = len(corpus)
    df = [Counter() for _ in range(4)]
    for ref_set in corpus:
        for n in range(1, 5):
            seen = set()
            for r in ref_set:
                seen.update(ngrams(r, n))
            for g in seen:
                df[n - 1][g] += 1

    def vec(tokens, n):
        return {g: k * (mp.log(size) - mp.log(max(1, df[n - 1][g])))
                for g, k in ngrams(tokens, n).items()}

    total = mp.mpf(0)
    for r in refs:
        penalty = mp.exp(-mp.mpf(len(cand) - len(r)) ** 2 / (2 * sigma ** 2))
        for n in range(1, 5):
            vc, vr = vec(cand, n), vec(r, n)
            nc = mp.sqrt(mp.fsum(w * w for w in vc.values()))
            nr = mp.sqrt(mp.fsum(w * w for w in vr.values()))
            if nc == 0 or nr == 0:
                continue
            dot = mp.fsum(w * vr.get(g, 0) for g, w in vc.items())
            total += min(mp.mpf(1), dot / (nc * nr)) * penalty
    return 10 * total / 4 / len(refs)


def main():
    out = []
    for name, cand, refs, others in FIXTURES:
        c = cand.split()
        rs = [r.split() for r in refs]
        corpus = [rs] + [[o.split() for o in other] for other in others]
        out.append({
            "name": name, "candidate": cand, "references": refs, "corpus": others,
            "bleu1": mp.nstr(bleu(c, rs, 1), 25), "bleu4": mp.nstr(bleu(c, rs, 4), 25),
            "rouge_l": mp.nstr(rouge_l(c, rs), 25), "cider": mp.nstr(cider(c, rs, corpus), 25),
        })
    print(json.dumps({"fixtures": out}, indent=2))


if __name__ == "__main__":
    main()
