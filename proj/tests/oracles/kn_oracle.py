#!/usr/bin/env python3
# Copyright 2026 The semicorpus Authors
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
"""Definition-level interpolated Kneser-Ney, used only to freeze test values.

Counts are recomputed from the raw sentences on every query; nothing is shared
with the C++ trainer.
"""
import math
import sys
from collections import Counter

BOS, EOS = "<s>", "</s>"


class NaiveKN:
    def __init__(self, sentences, order, discount=None):
        self.order = order
        self.padded = [[BOS] + s.split() + [EOS] for s in sentences]
        self.raw = Counter()
        for s in self.padded:
            for n in range(1, order + 1):
                for i in range(len(s) - n + 1):
                    self.raw[tuple(s[i:i + n])] += 1
        self.fixed_discount = discount

    def ngrams(self, n):
        return [g for g in self.raw if len(g) == n]

    def adjusted(self, g):
        n = len(g)
        if n == self.order or g[0] == BOS:
            return self.raw.get(g, 0)
        return len({e[0] for e in self.ngrams(n + 1) if e[1:] == g})

    def discount(self, n):
        if self.fixed_discount is not None:
            return self.fixed_discount
        cc = Counter(self.adjusted(g) for g in self.ngrams(n))
        n1, n2 = cc.get(1, 0), cc.get(2, 0)
        if n1 == 0 or n2 == 0:
            return 0.5
        return n1 / (n1 + 2 * n2)

    def prob(self, w, h):
        h = tuple(h)[-(self.order - 1):] if self.order > 1 else ()
        n = len(h) + 1
        if n == 1:
            total = sum(self.adjusted(g) for g in self.ngrams(1) if g[0] != BOS)
            return self.adjusted((w,)) / total
        ext = {g: self.adjusted(g) for g in self.ngrams(n) if g[:-1] == h}
        s = sum(ext.values())
        if s == 0:
            return self.prob(w, h[1:])
        d = self.discount(n)
        types = sum(1 for v in ext.values() if v > 0)
        return max(ext.get(h + (w,), 0) - d, 0) / s + d * types / s * self.prob(w, h[1:])

    def sentence_log10(self, sentence):
        toks = sentence.split() + [EOS]
        ctx = [BOS]
        total = 0.0
        for w in toks:
            total += math.log10(self.prob(w, ctx))
            ctx.append(w)
        return total, len(toks)

    def ppl(self, sentence):
        lp, n = self.sentence_log10(sentence)
        return 10 ** (-lp / n)


def main():
    m = NaiveKN(["a b", "a c"], 2, 0.5)
    print("p(b|a) two-sentence bigram D=0.5:", repr(m.prob("b", ["a"])))

    m1 = NaiveKN(["a b a", "c a"], 1, 0.0)
    print("order1 D=0 p(a):", repr(m1.prob("a", [])), "p(</s>):", repr(m1.prob(EOS, [])))

    corpus = ["press two for sales", "press three for service", "thanks for calling"]
    for d in (0.5, None):
        m = NaiveKN(corpus, 3, d)
        print("-- trigram discount", d, "D2", m.discount(2), "D3", m.discount(3))
        for s in corpus:
            lp, n = m.sentence_log10(s)
            print("  ppl(%s) = %r  log10=%r n=%d" % (s, m.ppl(s), lp, n))
        print("  ppl(press two for service) =", repr(m.ppl("press two for service")))
        print("  log10 p(for|<s> press)", repr(math.log10(m.prob("for", [BOS, "press"]))))
        print("  log10 p(calling|two for)", repr(math.log10(m.prob("calling", ["two", "for"]))))
        print("  log10 p(calling|for)", repr(math.log10(m.prob("calling", ["for"]))))
        print("  log10 p(sales|thanks)", repr(math.log10(m.prob("sales", ["thanks"]))))
        print("  log10 p(sales)", repr(math.log10(m.prob("sales", []))))


if __name__ == "__main__":
    sys.exit(main())
