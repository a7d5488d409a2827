"""Small planted corpora of symbol/description sentences for smoke tests and demos."""

from __future__ import annotations

import numpy as np

from .ingest import CharSpan, EntityAnnotation, RawDocument, RelationAnnotation

SYMBOLS = list("abcdfghkmnpqrstuvwxyz") + ["\\alpha", "\\beta", "\\gamma", "\\lambda",
                                         "\\sigma", "\\theta"]
DESCRIPTIONS = [
    "mass of the particle", "learning rate", "hidden state", "interest rate",
    "expected utility", "electric field", "time step", "reward function",
    "wave number", "discount factor", "output vector", "market price",
    "loss function", "spin operator", "input sequence", "tax rate",
]
PLURALS = ["coordinates of the point", "weights of the layers", "prices of the goods",
           "eigenvalues of the matrix", "parameters of the model"]
COUNT_NOUNS = ["samples", "iterations", "agents", "nodes", "layers", "firms", "photons"]
FILLERS = [
    "This follows from $a + b = c$ .",
    "We now state the main result .",
    "The proof is given in the appendix .",
    "Note that $f ( x ) \\geq 0$ holds .",
]
DOMAINS = ["cs", "econ", "math", "physics"]


class _Builder:
    def __init__(self):
        self.parts: list[str] = []
        self.length = 0
        self.entities: list[EntityAnnotation] = []
        self.relations: list[RelationAnnotation] = []

    def text(self, s):
        self.parts.append(s)
        self.length += len(s)

    def mention(self, s, etype):
        ent = EntityAnnotation(f"T{len(self.entities) + 1}", etype,
                               CharSpan(self.length, self.length + len(s)))
        self.entities.append(ent)
        self.text(s)
        return ent.id

    def relate(self, typ, head, tail):
        self.relations.append(RelationAnnotation(typ, head, tail))


def make_planted_corpus(n_docs: int = 20, seed: int = 0, sentences: tuple = (3, 5)) -> list[RawDocument]:
    """Documents built from fixed templates with fully annotated relations.

    Every document starts with a Direct definition so later sentences can
    refer back to an earlier symbol (Corefer-Symbol) or description
    (Corefer-Description), and contains at least one ORDERED description, so
    each entity type has a gold mention in every document.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for d in range(n_docs):
        b = _Builder()
        symbols = list(rng.permutation(SYMBOLS))
        descs = list(rng.permutation(DESCRIPTIONS))
        defined = []  # (symbol string, symbol entity id, description string, description id)
        n_sent = int(rng.integers(sentences[0], sentences[1] + 1))
        # one ordered sentence per document so every entity type has a gold mention
        rest = ["ordered"] + list(rng.choice(
            ["direct", "count", "corefer_symbol", "corefer_description", "ordered", "filler"],
            size=n_sent - 2))
        kinds = ["direct"] + list(rng.permutation(rest))
        for kind in kinds:
            if b.length:
                b.text(" ")
            if kind == "direct" or (kind.startswith("corefer") and not defined):
                sym, desc = symbols.pop(), descs.pop()
                if rng.random() < 0.5:
                    b.text("Let $")
                    s_id = b.mention(sym, "SYMBOL")
                    b.text("$ denote the ")
                    d_id = b.mention(desc, "PRIMARY")
                    b.text(" .")
                else:
                    b.text("Here the ")
                    d_id = b.mention(desc, "PRIMARY")
                    b.text(" is written $")
                    s_id = b.mention(sym, "SYMBOL")
                    b.text("$ .")
                b.relate("Direct", d_id, s_id)
                defined.append((sym, s_id, desc, d_id))
            elif kind == "count":
                sym, noun = symbols.pop(), COUNT_NOUNS[int(rng.integers(len(COUNT_NOUNS)))]
                b.text("We use $")
                s_id = b.mention(sym, "SYMBOL")
                b.text("$ ")
                n_id = b.mention(noun, "PRIMARY")
                b.text(" in total .")
                b.relate("Count", n_id, s_id)
            elif kind == "corefer_symbol":
                sym, first_id, _, _ = defined[int(rng.integers(len(defined)))]
                b.text("Then $")
                s_id = b.mention(sym, "SYMBOL")
                b.text("$ stays fixed .")
                b.relate("Corefer-Symbol", s_id, first_id)
            elif kind == "corefer_description":
                _, _, desc, first_id = defined[int(rng.integers(len(defined)))]
                b.text("Again , the ")
                d_id = b.mention(desc, "PRIMARY")
                b.text(" is bounded .")
                b.relate("Corefer-Description", d_id, first_id)
            elif kind == "ordered":
                s1, s2 = symbols.pop(), symbols.pop()
                plural = PLURALS[int(rng.integers(len(PLURALS)))]
                b.text("Let $")
                a_id = b.mention(s1, "SYMBOL")
                b.text("$ and $")
                c_id = b.mention(s2, "SYMBOL")
                b.text("$ be the ")
                p_id = b.mention(plural, "ORDERED")
                b.text(" .")
                b.relate("Direct", p_id, a_id)
                b.relate("Direct", p_id, c_id)
            else:
                b.text(FILLERS[int(rng.integers(len(FILLERS)))])
        docs.append(RawDocument(id=f"synth-{seed}-{d:03d}", text="".join(b.parts),
                                domain=DOMAINS[d % len(DOMAINS)],
                                entities=b.entities, relations=b.relations))
    return docs
