#!/usr/bin/env python3
"""Writes the planted 30-page fixture corpus.

Layout per topic i (0..9):
  T_i  target page; links S_i, D_i and T_{i+1}; cites G_i and H_i
  S_i  relevant source; shares topic words with T_i; cites G_i (context close
       to T_i's sentence about S_i) plus two off-topic references
  D_i  decoy; unrelated summary; cites J_i in a sentence copied from T_i's
       sentence about D_i, so a context-only ranker prefers J_i
Even decoys also link T_i and S_i in one sentence. N_01 is cited by S_0 and
listed on T_1.

Outputs next to this script's ../planted directory:
  corpus.jsonl, corpus.wikitext.jsonl, vectors.txt, manifest.json, config.toml
"""

import json
import random
import re
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "planted"

TOPICS = [
    ("Graph theory", "Planar graph", "vertices edges graphs crossings embedding drawings adjacency colorings"),
    ("Cryptography", "Public-key cryptography", "ciphers encryption secrecy signatures plaintext adversary protocols hashing"),
    ("Machine learning", "Perceptron", "training classifiers neurons weights gradient supervised datasets generalization"),
    ("Automata theory", "Finite-state machine", "automata states transitions alphabet languages acceptance regular nondeterminism"),
    ("Information retrieval", "Inverted index", "documents queries ranking postings relevance indexing retrieval terms"),
    ("Compiler construction", "Parsing", "grammars tokens syntax lexer compilers productions derivations parser"),
    ("Computational geometry", "Convex hull", "polygons points hulls geometric triangulation coordinates planes segments"),
    ("Database theory", "Relational algebra", "relations tuples joins schemas projection normalization attributes selection"),
    ("Operating systems", "Process scheduling", "processes kernels scheduling threads preemption interrupts dispatch multitasking"),
    ("Numerical analysis", "Floating-point arithmetic", "rounding precision errors approximation iterations convergence mantissa stability"),
]

DECOYS = [
    ("Sourdough bread", "flour yeast dough baking crust oven starter loaves"),
    ("Tomato gardening", "seedlings compost trellis watering mulch harvest soil vines"),
    ("Dinghy sailing", "sails rudder tacking regatta mast wind hull jib"),
    ("Association football", "goals strikers midfield penalties stadium league referee tackles"),
    ("Opera singing", "arias soprano librettos tenor stage orchestra chorus overture"),
    ("Knitting", "yarn needles stitches purl wool scarves patterns knots"),
    ("Volcano tourism", "lava craters eruptions magma ash summit hiking geysers"),
    ("Wine tasting", "grapes vineyards tannins vintage cellar barrels aroma corks"),
    ("Birdwatching", "binoculars warblers migration feathers nests plumage songbirds wetlands"),
    ("Pottery", "clay kiln glaze wheel ceramics porcelain firing vases"),
]

OFF_TOPIC = [
    "archives museum letters correspondence biography",
    "anniversary celebration awards ceremony medals",
    "translation editions publishers printing volumes",
    "conference venues travel hotels attendance",
    "funding agencies grants budgets committees",
    "obituary memorial tribute colleagues legacy",
    "textbook exercises classroom students lectures",
    "popular magazine interview journalists newspapers",
    "patents licensing lawsuits courts royalties",
    "portraits photographs paintings gallery exhibition",
    "television documentary broadcast viewers episodes",
    "timeline chronology decades centuries eras",
]

VECTOR_DIM = 16
VECTOR_SEED = 20240611


class Page:
    def __init__(self, title):
        self.title = title
        self.paragraphs = []
        self.listed = []

    def paragraph(self, *sentences):
        self.paragraphs.append(list(sentences))

    def listed_ref(self, title):
        self.listed.append(title)


def link(target, label=None):
    return ("link", target, label)


def ref(title, kind="journal"):
    return ("ref", title, kind)


def cite(title, kind):
    return "{{cite %s |title=%s}}" % (kind, title)


def render(page):
    """Returns (wikitext, record) for a page."""
    wiki_paragraphs = []
    record = {"title": page.title, "summary": "", "sentences": [], "wikilinks": [], "references": []}
    for p_index, sentences in enumerate(page.paragraphs):
        lines = []
        plain_sentences = []
        for parts in sentences:
            wiki = ""
            plain = ""
            sentence_index = len(record["sentences"]) + len(plain_sentences)
            for part in parts:
                if isinstance(part, str):
                    wiki += part
                    plain += part.replace("'''", "")
                elif part[0] == "link":
                    _, target, label = part
                    wiki += "[[%s|%s]]" % (target, label) if label else "[[%s]]" % target
                    plain += label or target
                    record["wikilinks"].append({"target": target, "sentence": sentence_index})
                else:
                    _, title, kind = part
                    raw = cite(title, kind)
                    wiki += "<ref>%s</ref>" % raw
                    record["references"].append({"title": title, "raw": raw, "sentence": sentence_index})
            lines.append(wiki)
            plain_sentences.append(plain)
        wiki_paragraphs.append("\n".join(lines))
        if p_index == 0:
            record["summary"] = " ".join(plain_sentences)
        record["sentences"].extend(plain_sentences)
    wikitext = "\n\n".join(wiki_paragraphs)
    if page.listed:
        wikitext += "\n\n== References ==\n" + "\n".join("* " + cite(t, "book") for t in page.listed)
        for t in page.listed:
            record["references"].append({"title": t, "raw": cite(t, "book"), "sentence": None})
    return wikitext + "\n", record


def build():
    pages = []
    manifest = {"targets": [], "gold": {}, "relevant_links": {}, "decoy_links": {}, "junk": {}, "unreachable_gold": {}}
    for i, (target, source, words) in enumerate(TOPICS):
        w = words.split()
        decoy, dwords = DECOYS[i]
        d = dwords.split()
        nxt = TOPICS[(i + 1) % len(TOPICS)][0]
        gold_title = "%s %s and %s: a survey" % (w[5].capitalize(), w[6], w[7])
        unreachable = "Foundations of %s" % target.lower()
        junk_title = "%s and %s for beginners" % (d[0].capitalize(), d[1])
        noise = [OFF_TOPIC[(2 * i) % len(OFF_TOPIC)], OFF_TOPIC[(2 * i + 1) % len(OFF_TOPIC)]]
        noise_titles = ["Notes on %s" % n.split()[0] for n in noise]
        if i == 0:
            noise_titles[0] = "Shared reading list"

        t = Page(target)
        t.paragraph(
            ["'''%s''' studies %s, %s and %s." % (target, w[0], w[1], w[2])],
            ["It also covers %s and %s." % (w[3], w[4])],
        )
        t.paragraph(
            ["Work on ", link(source), " examines %s %s and %s in depth." % (w[5], w[6], w[7])],
            ["Many readers also enjoy ", link(decoy), " with %s and %s on weekends." % (d[0], d[1])],
            ["A companion article is ", link(nxt), "."],
            ["Standard texts cover %s thoroughly." % w[0], ref(gold_title), ref(unreachable, "book")],
        )
        if i == 1:
            t.listed_ref(noise_titles_0[0])

        s = Page(source)
        s.paragraph(
            ["'''%s''' is a topic in %s." % (source, target.lower())],
            ["It concerns %s, %s, %s and %s." % (w[0], w[1], w[2], w[3])],
        )
        s.paragraph(
            ["Work on %s examines %s %s and %s closely." % (source, w[5], w[6], w[7]), ref(gold_title)],
            ["Historical surveys mention %s." % noise[0], ref(noise_titles[0])],
            ["Later commentary discusses %s." % noise[1], ref(noise_titles[1])],
            ["It is sometimes compared with ", link(nxt), "."],
        )

        dp = Page(decoy)
        dp.paragraph(
            ["'''%s''' is a pastime involving %s, %s, %s and %s." % (decoy, d[2], d[3], d[4], d[5])],
            ["Enthusiasts share %s and %s." % (d[6], d[7])],
        )
        second = [["Many readers also enjoy %s with %s and %s on weekends." % (decoy, d[0], d[1]), ref(junk_title)]]
        if i % 2 == 0:
            second.append(["Fans of ", link(target), " and ", link(source), " meet here."])
        dp.paragraph(*second)

        pages.extend([t, s, dp])
        if i == 0:
            noise_titles_0 = noise_titles

        manifest["targets"].append(target)
        manifest["gold"][target] = sorted({normalize(gold_title), normalize(unreachable)})
        manifest["relevant_links"][target] = [source]
        manifest["decoy_links"][target] = [decoy, nxt]
        manifest["junk"][target] = normalize(junk_title)
        manifest["unreachable_gold"][target] = normalize(unreachable)
    # T_1 also lists N_01, shared with S_0.
    manifest["gold"][TOPICS[1][0]] = sorted(set(manifest["gold"][TOPICS[1][0]]) | {normalize("Shared reading list")})
    return pages, manifest


def normalize(title):
    kept = "".join(c for c in title if c.isalnum() or c.isspace())
    return " ".join(kept.lower().split())


def tokens(text):
    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    pages, manifest = build()
    order = sorted(pages, key=lambda p: p.title)
    vocab = set()
    with open(OUT / "corpus.jsonl", "w") as records, open(OUT / "corpus.wikitext.jsonl", "w") as bundle:
        for page in order:
            wikitext, record = render(page)
            records.write(json.dumps(record, ensure_ascii=False) + "\n")
            bundle.write(json.dumps({"title": page.title, "wikitext": wikitext}, ensure_ascii=False) + "\n")
            for sentence in record["sentences"]:
                vocab.update(tokens(sentence))
            for r in record["references"]:
                vocab.update(tokens(r["title"]))

    rng = random.Random(VECTOR_SEED)
    lines = []
    for word in sorted(vocab):
        vec = [rng.gauss(0.0, 1.0) for _ in range(VECTOR_DIM)]
        # every seventh word or so is left out of the vocabulary
        if sum(map(ord, word)) % 7 == 0:
            continue
        lines.append(word + " " + " ".join("%.6f" % x for x in vec))
    with open(OUT / "vectors.txt", "w") as f:
        f.write("%d %d\n" % (len(lines), VECTOR_DIM))
        f.write("\n".join(lines) + "\n")

    manifest["pages"] = len(pages)
    manifest["vector_dim"] = VECTOR_DIM
    with open(OUT / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    targets = ", ".join('"%s"' % t for t in manifest["targets"])
    (OUT / "config.toml").write_text(
        "seed = 7\n"
        'corpus = "corpus.jsonl"\n'
        'vectors = "vectors.txt"\n'
        "targets = [%s]\n\n"
        "[evaluate]\n"
        "split_ratio = 0.7\n"
        "ks = [1, 2, 3, 4, 5, 10]\n\n"
        "[recommend]\n"
        "k = 5\n" % targets
    )


if __name__ == "__main__":
    main()
