#!/usr/bin/env python3
"""Regenerate the bundled mini corpus and labeled mini dataset under data/.

The output is committed; rerunning with the same seed reproduces it exactly.
"""

import argparse
import pathlib
import random

AUTHORS = ["Cutting", "Brill", "Church", "Collins", "Charniak", "Ratnaparkhi", "Och",
           "Koehn", "Lafferty", "Pang", "Turney", "Mikolov", "Hearst", "Yarowsky",
           "Brown", "Marcus", "Klein", "Manning", "Nivre", "Lin"]
TASKS = ["part-of-speech tagging", "parsing", "machine translation", "word sense disambiguation",
         "sentiment classification", "named entity recognition", "coreference resolution",
         "text summarization", "word alignment", "language modeling"]
MODELS = ["hidden Markov models", "maximum entropy models", "conditional random fields",
          "support vector machines", "decision lists", "neural networks",
          "phrase-based models", "log-linear models", "transformation-based learning"]
DATA = ["the Penn Treebank", "the Brown corpus", "the Europarl corpus", "the WSJ corpus",
        "the ACL Anthology", "newswire text", "movie reviews"]

POSITIVE = [
    "{m} developed by {c} achieve state of the art results on {t}.",
    "The approach of {c} is effective for {t} and outperforms earlier {m}.",
    "{c} successfully applied {m} to {t} with excellent accuracy.",
    "We follow {c}, whose {m} proved robust and accurate for {t}.",
    "The method of {c} significantly improves {t} on {d}.",
    "Following the promising results of {c}, we use {m} for {t}.",
]
NEGATIVE = [
    "However, the {m} of {c} fail to capture long-distance dependencies in {t}.",
    "The approach of {c} suffers from data sparseness on {d}.",
    "Unfortunately, {m} as used by {c} perform poorly on {t}.",
    "{c} report a limited improvement, and their {m} are difficult to train.",
    "The results of {c} on {d} are disappointing for {t}.",
    "Unlike {c}, we avoid the errors that {m} make on {t}.",
]
OBJECTIVE = [
    "{c} applied {m} to {t}.",
    "We use {d} as described by {c}.",
    "{m} were introduced for {t} (e.g. {c}).",
    "A similar setup for {t} is described in {c}, Sec. 3.",
    "{c} trained {m} on {d} for {t}.",
    "The features of {c} are listed in Fig. 2 and Tab. 1.",
    "Statistics of {d} are given by {c}.",
    "For {t} we refer to the survey of {c}.",
]
NOISE = ["Publication Year.", "Abstract.", "References.", "Table 1.", "Acknowledgments."]


def cite(rng):
    a = rng.choice(AUTHORS)
    year = rng.randint(1985, 2015)
    if rng.random() < 0.5:
        return f"{a} et al. ({year})"
    return f"{a} ({year})"


def fill(template, rng):
    s = template.format(c=cite(rng), m=rng.choice(MODELS), t=rng.choice(TASKS), d=rng.choice(DATA))
    return s[0].upper() + s[1:]


def document(rng, n_sentences):
    parts = []
    for _ in range(n_sentences):
        r = rng.random()
        if r < 0.06:
            parts.append(rng.choice(NOISE))
        elif r < 0.26:
            parts.append(fill(rng.choice(POSITIVE), rng))
        elif r < 0.46:
            parts.append(fill(rng.choice(NEGATIVE), rng))
        else:
            parts.append(fill(rng.choice(OBJECTIVE), rng))
    lines, line = [], []
    for p in parts:
        line.append(p)
        if rng.random() < 0.25:
            lines.append(" ".join(line))
            line = []
    if line:
        lines.append(" ".join(line))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    corpus = out / "mini_corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for i in range(16):
        (corpus / f"paper{i:02d}.txt").write_text(document(rng, rng.randint(35, 60)), encoding="utf-8")

    rows = []
    for label, templates, count in (("p", POSITIVE, 40), ("n", NEGATIVE, 30), ("o", OBJECTIVE, 80)):
        for _ in range(count):
            rows.append((label, fill(rng.choice(templates), rng)))
    rng.shuffle(rows)
    with open(out / "mini_citations.tsv", "w", encoding="utf-8") as f:
        f.write("#labels: o=objective,n=negative,p=positive\n")
        for label, text in rows:
            f.write(f"{label}\t{text}\n")


if __name__ == "__main__":
    main()
