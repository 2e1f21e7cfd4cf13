#!/usr/bin/env python3
"""Standalone recomputation of the link and reference features on the
planted fixture, read directly from the raw wikitext bundle.

Writes ../planted/expected_features.json.
"""

import json
import math
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
PLANTED = ROOT / "fixtures" / "planted"
STOPWORDS = {
    line.strip()
    for line in (ROOT / "crates" / "core" / "src" / "stopwords.txt").read_text().splitlines()
    if line.strip() and not line.startswith("#")
}

PAIRS = [
    ("Graph theory", "Planar graph"),
    ("Graph theory", "Sourdough bread"),
    ("Graph theory", "Cryptography"),
    ("Cryptography", "Public-key cryptography"),
    ("Cryptography", "Tomato gardening"),
    ("Machine learning", "Perceptron"),
    ("Information retrieval", "Inverted index"),
    ("Information retrieval", "Opera singing"),
    ("Numerical analysis", "Graph theory"),
    ("Operating systems", "Process scheduling"),
]

TRIPLES = [
    ("Graph theory", "Planar graph", 0),
    ("Graph theory", "Planar graph", 1),
    ("Graph theory", "Planar graph", 2),
    ("Graph theory", "Sourdough bread", 0),
    ("Graph theory", "Cryptography", 0),
    ("Graph theory", "Cryptography", 2),
    ("Cryptography", "Public-key cryptography", 0),
    ("Cryptography", "Public-key cryptography", 2),
    ("Compiler construction", "Knitting", 0),
    ("Numerical analysis", "Floating-point arithmetic", 1),
]

LINK = re.compile(r"\[\[([^\]|]+)(?:\|([^\]]+))?\]\]")
REF = re.compile(r"<ref>(.*?)</ref>")
MARK = re.compile(r"\x00(\d+)\x00")
BOUNDARY = re.compile(r"[.!?]((?:\x00\d+\x00)*)\s+(?=[^a-z\s])")


def parse(title, wikitext):
    body = wikitext.split("\n== References ==")[0]
    listed = []
    if "\n== References ==" in wikitext:
        for line in wikitext.split("\n== References ==")[1].splitlines():
            if line.startswith("*"):
                listed.append(line[1:].strip())
    sentences, links, refs = [], [], []
    paragraphs = [p for p in body.split("\n\n") if p.strip()]
    summary = None
    for para in paragraphs:
        text = " ".join(l.strip() for l in para.splitlines())
        ref_bodies = []

        def mark(m):
            ref_bodies.append(m.group(1))
            return "\x00%d\x00" % (len(ref_bodies) - 1)

        text = REF.sub(mark, text)
        chunks, start = [], 0
        for m in BOUNDARY.finditer(text):
            chunks.append(text[start:m.end(1)])
            start = m.end()
        chunks.append(text[start:])
        plain_chunks = []
        for chunk in chunks:
            index = len(sentences) + len(plain_chunks)
            for m in LINK.finditer(chunk):
                links.append((m.group(1).strip(), index))
            for m in MARK.finditer(chunk):
                refs.append((ref_title(ref_bodies[int(m.group(1))]), index))
            plain = MARK.sub("", chunk)
            plain = LINK.sub(lambda m: m.group(2) or m.group(1), plain).replace("'''", "").strip()
            plain_chunks.append(plain)
        if summary is None:
            summary = len(plain_chunks)
        sentences.extend(plain_chunks)
    for entry in listed:
        refs.append((ref_title(entry), None))
    return {"title": title, "sentences": sentences, "summary": " ".join(sentences[:summary]), "links": links, "refs": refs}


def ref_title(body):
    m = re.search(r"\|\s*title\s*=\s*([^|}]*)", body)
    return m.group(1).strip()


def tokens(text):
    out, cur = [], ""
    for c in text.lower():
        if c.isalnum():
            cur += c
        else:
            if cur:
                out.append(cur)
            cur = ""
    if cur:
        out.append(cur)
    return [t for t in out if t not in STOPWORDS]


class Model:
    def __init__(self, pages, vectors):
        self.pages = pages
        self.n = len(pages)
        self.df = {}
        for p in pages.values():
            for t in set(tokens(" ".join(p["sentences"]))):
                self.df[t] = self.df.get(t, 0) + 1
        self.vectors = vectors
        self.outl = {t: {l for l, _ in p["links"] if l in pages} for t, p in pages.items()}
        self.inl = {t: set() for t in pages}
        for t, outs in self.outl.items():
            for o in outs:
                self.inl[o].add(t)

    def tfidf(self, text):
        counts = {}
        for t in tokens(text):
            counts[t] = counts.get(t, 0) + 1
        return {t: c * (math.log((1 + self.n) / (1 + self.df.get(t, 0))) + 1) for t, c in counts.items()}

    def cos_sparse(self, a, b):
        u, v = self.tfidf(a), self.tfidf(b)
        dot = sum(w * v.get(t, 0.0) for t, w in u.items())
        nu = sum(w * w for w in u.values())
        nv = sum(w * w for w in v.values())
        return 0.0 if nu == 0 or nv == 0 else max(-1.0, min(1.0, dot / math.sqrt(nu * nv)))

    def embed(self, text):
        known = [self.vectors[t] for t in tokens(text) if t in self.vectors]
        dim = len(next(iter(self.vectors.values())))
        if not known:
            return [0.0] * dim
        return [sum(v[i] for v in known) / len(known) for i in range(dim)]

    def cos_dense(self, a, b):
        u, v = self.embed(a), self.embed(b)
        dot = sum(x * y for x, y in zip(u, v))
        nu = sum(x * x for x in u)
        nv = sum(y * y for y in v)
        if nu == 0 or nv == 0:
            return 0.0
        return max(0.0, min(1.0, dot / math.sqrt(nu * nv)))

    def mentioning(self, page, targets):
        idx = sorted({i for l, i in page["links"] if l in targets and i is not None})
        return " ".join(page["sentences"][i] for i in idx)

    def pair_sims(self, x, y):
        if not x or not y:
            return 0.0, 0.0
        return self.cos_sparse(x, y), self.cos_dense(x, y)

    def step1(self, a_title, b_title):
        a, b = self.pages[a_title], self.pages[b_title]
        oa, ob, ia, ib = self.outl[a_title], self.outl[b_title], self.inl[a_title], self.inl[b_title]
        jac = lambda x, y: 0.0 if not (x | y) else len(x & y) / len(x | y)
        common_out = oa & ob
        oss_a = self.mentioning(a, common_out)
        oss_b = self.mentioning(b, common_out)
        iss_a, iss_b = [], []
        for linker in sorted(ia & ib):
            p = self.pages[linker]
            sa = self.mentioning(p, {a_title})
            sb = self.mentioning(p, {b_title})
            if sa:
                iss_a.append(sa)
            if sb:
                iss_b.append(sb)
        tis, vs = self.pair_sims(a["summary"], b["summary"])
        oss, osvs = self.pair_sims(oss_a, oss_b)
        iss, isvs = self.pair_sims(" ".join(iss_a), " ".join(iss_b))
        return {"tis": tis, "os": jac(oa, ob), "is": jac(ia, ib), "oss": oss, "iss": iss, "vs": vs, "osvs": osvs, "isvs": isvs}

    def step2(self, a_title, b_title, ref_index):
        a, b = self.pages[a_title], self.pages[b_title]
        mention = self.mentioning(a, {b_title})
        title, sentence = b["refs"][ref_index]
        context = b["sentences"][sentence] if sentence is not None else ""
        f1_ti = self.cos_sparse(context, mention)
        f1_vec = 0.0 if not mention or not context else self.cos_dense(context, mention)
        f2_ti = self.cos_sparse(title, mention)
        return {"f1_ti": f1_ti, "f1_vec": f1_vec, "f2_ti": f2_ti, "reference": title}


def load_vectors(path):
    vectors = {}
    with open(path) as f:
        lines = f.read().splitlines()
    for line in lines[1:]:
        parts = line.split()
        vectors[parts[0]] = [float(x) for x in parts[1:]]
    return vectors


def main():
    pages = {}
    with open(PLANTED / "corpus.wikitext.jsonl") as f:
        for line in f:
            rec = json.loads(line)
            pages[rec["title"]] = parse(rec["title"], rec["wikitext"])
    model = Model(pages, load_vectors(PLANTED / "vectors.txt"))
    out = {
        "pairs": [{"target": a, "wikilink": b, "features": model.step1(a, b)} for a, b in PAIRS],
        "triples": [
            {"target": a, "wikilink": b, "reference_index": r, "features": model.step2(a, b, r)}
            for a, b, r in TRIPLES
        ],
    }
    with open(PLANTED / "expected_features.json", "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
