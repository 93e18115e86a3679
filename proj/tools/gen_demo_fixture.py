#!/usr/bin/env python3
"""Regenerates the bundled demo corpus under data/fixture.

Writes hand-built UD parses, the pairs file with gold explanations, a small
word-vector table, a separate shot pool and canned LLM completions. The
response cache (llm_cache.jsonl) is produced afterwards by running
`ssm demo` once against an empty cache and copying <out>/llm_cache.jsonl.

Usage: gen_demo_fixture.py [OUT_DIR]
"""

import json
import random
import sys
from pathlib import Path

SEED = 20240611
DIM = 24

VERBS = {
    "sleeping": "sleep", "running": "run", "sitting": "sit", "playing": "play",
    "eating": "eat", "reading": "read", "walking": "walk", "swimming": "swim",
    "cooking": "cook", "exercising": "exercise", "jumping": "jump",
    "dancing": "dance", "standing": "stand", "resting": "rest", "moving": "move",
}
NOUN_LEMMA = {"people": "person"}

# verbs that cannot hold at the same time as each other
INCOMPATIBLE = [
    ("sleeping", "running"), ("sleeping", "dancing"), ("sitting", "walking"),
    ("sitting", "jumping"), ("swimming", "reading"), ("eating", "sleeping"),
    ("standing", "sitting"), ("sleeping", "cooking"),
]
OPPOSED_SUBJECTS = [("man", "woman"), ("boy", "girl"), ("dog", "cat")]
HYPERNYM = {"man": "person", "woman": "person", "boy": "child", "girl": "child", "dog": "animal", "cat": "animal"}
SYNONYM_VERB = {"exercising": "moving", "sleeping": "resting", "running": "moving", "dancing": "moving"}
LOCATIONS = [("on", "couch"), ("on", "beach"), ("in", "street"), ("in", "park"), ("in", "kitchen"),
             ("on", "treadmill"), ("on", "stage"), ("in", "pool"), ("at", "table"), ("on", "grass")]
OBJECTS = {"playing": ["guitar", "ball"], "reading": ["book", "newspaper"], "eating": ["sandwich", "pizza"],
           "cooking": ["dinner", "pasta"]}
CLOTHING = [("red", "shirt"), ("blue", "hat"), ("black", "jacket"), ("green", "dress")]


class Sentence:
    """Builds one declarative sentence and its UD tree."""

    def __init__(self, subj, verb, obj=None, loc=None, cloth=None, subj_adj=None):
        self.subj, self.verb, self.obj, self.loc, self.cloth, self.subj_adj = subj, verb, obj, loc, cloth, subj_adj

    def tokens(self):
        # (form, lemma, upos, head_key, deprel, key)
        first = self.subj_adj or self.subj
        article = "An" if first[0] in "aeiou" else "A"
        t = [(article, "a", "DET", "subj", "det", "det_s")]
        if self.subj_adj:
            t.append((self.subj_adj, self.subj_adj, "ADJ", "subj", "amod", "adj_s"))
        t.append((self.subj, NOUN_LEMMA.get(self.subj, self.subj), "NOUN", "verb", "nsubj", "subj"))
        if self.cloth:
            adj, noun = self.cloth
            t += [("in", "in", "ADP", "cloth", "case", "case_c"), ("a", "a", "DET", "cloth", "det", "det_c"),
                  (adj, adj, "ADJ", "cloth", "amod", "adj_c"), (noun, noun, "NOUN", "subj", "nmod", "cloth")]
        t.append(("is", "be", "AUX", "verb", "aux", "aux"))
        t.append((self.verb, VERBS[self.verb], "VERB", None, "root", "verb"))
        if self.obj:
            t += [("a", "a", "DET", "obj", "det", "det_o"), (self.obj, self.obj, "NOUN", "verb", "obj", "obj")]
        if self.loc:
            prep, noun = self.loc
            t += [(prep, prep, "ADP", "loc", "case", "case_l"), ("the", "the", "DET", "loc", "det", "det_l"),
                  (noun, noun, "NOUN", "verb", "obl", "loc")]
        t.append((".", ".", "PUNCT", "verb", "punct", "punct"))
        return t

    def text(self):
        words = [w[0] for w in self.tokens()]
        return " ".join(words[:-1]) + "."

    def conllu(self, sent_id):
        toks = self.tokens()
        index = {tok[5]: i + 1 for i, tok in enumerate(toks)}
        lines = [f"# sent_id = {sent_id}", f"# text = {self.text()}"]
        for i, (form, lemma, upos, head, rel, _) in enumerate(toks, 1):
            h = 0 if head is None else index[head]
            lines.append(f"{i}\t{form}\t{lemma}\t{upos}\t_\t_\t{h}\t{rel}\t_\t_")
        return "\n".join(lines) + "\n"


class Coordinated:
    """Inadmissible sentence: coordinated subjects or coordinated verbs."""

    def __init__(self, kind, a, b, verb, verb2=None, loc=None):
        self.kind, self.a, self.b, self.verb, self.verb2, self.loc = kind, a, b, verb, verb2, loc

    def rows(self):
        if self.kind == "subjects":
            rows = [("A", "a", "DET", 2, "det"), (self.a, self.a, "NOUN", 7, "nsubj"),
                    ("and", "and", "CCONJ", 5, "cc"), ("a", "a", "DET", 5, "det"),
                    (self.b, self.b, "NOUN", 2, "conj"), ("are", "be", "AUX", 7, "aux"),
                    (self.verb, VERBS[self.verb], "VERB", 0, "root")]
        else:
            rows = [("A", "a", "DET", 2, "det"), (self.a, self.a, "NOUN", 4, "nsubj"),
                    ("is", "be", "AUX", 4, "aux"), (self.verb, VERBS[self.verb], "VERB", 0, "root"),
                    ("and", "and", "CCONJ", 6, "cc"), (self.verb2, VERBS[self.verb2], "VERB", 4, "conj")]
        if self.loc:
            n = len(rows)
            rows += [(self.loc[0], self.loc[0], "ADP", n + 3, "case"), ("the", "the", "DET", n + 3, "det"),
                     (self.loc[1], self.loc[1], "NOUN", 4 if self.kind == "verbs" else 7, "obl")]
        rows.append((".", ".", "PUNCT", 4 if self.kind == "verbs" else 7, "punct"))
        return rows

    def text(self):
        words = [r[0] for r in self.rows()]
        return " ".join(words[:-1]) + "."

    def conllu(self, sent_id):
        lines = [f"# sent_id = {sent_id}", f"# text = {self.text()}"]
        for i, (form, lemma, upos, head, rel) in enumerate(self.rows(), 1):
            lines.append(f"{i}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
        return "\n".join(lines) + "\n"


def premise(rng):
    verb = rng.choice(sorted(VERBS.keys() - {"moving", "resting"}))
    subj = rng.choice(["man", "woman", "boy", "girl", "dog"] if verb not in OBJECTS else ["man", "woman", "boy", "girl"])
    obj = rng.choice(OBJECTS[verb]) if verb in OBJECTS and rng.random() < 0.7 else None
    loc = rng.choice(LOCATIONS) if rng.random() < 0.7 else None
    cloth = rng.choice(CLOTHING) if subj != "dog" and rng.random() < 0.3 else None
    return Sentence(subj, verb, obj, loc, cloth)


def entailment(p, rng):
    kind = rng.choice(["hypernym", "drop", "synonym"])
    if kind == "synonym" and p.verb in SYNONYM_VERB:
        h = Sentence(p.subj, SYNONYM_VERB[p.verb], loc=p.loc)
        return h, f"{p.verb.capitalize()} is a way of {h.verb}."
    if kind == "hypernym":
        h = Sentence(HYPERNYM[p.subj], p.verb, p.obj)
        article = "an" if h.subj[0] in "aeiou" else "a"
        return h, f"A {p.subj} is {article} {h.subj}."
    h = Sentence(p.subj, p.verb, p.obj, p.loc)
    if p.cloth or p.loc is None:
        h = Sentence(p.subj, p.verb, p.obj)
    return h, f"A {p.subj} {p.verb} is the same as a {p.subj} {p.verb}."


def contradiction(p, rng):
    kind = rng.choice(["verb", "location", "subject"])
    if kind == "verb":
        options = [b if a == p.verb else a for a, b in INCOMPATIBLE if p.verb in (a, b)]
        if options:
            other = rng.choice(options)
            h = Sentence(p.subj, other, loc=p.loc)
            return h, f"The {p.subj} cannot be {p.verb} and {other} at the same time."
    if kind == "location" and p.loc:
        other = rng.choice([l for l in LOCATIONS if l[1] != p.loc[1]])
        h = Sentence(p.subj, p.verb, loc=other)
        return h, f"The {p.subj} cannot be {p.loc[0]} the {p.loc[1]} and {other[0]} the {other[1]} at the same time."
    pair = next((x for x in OPPOSED_SUBJECTS if p.subj in x), OPPOSED_SUBJECTS[0])
    other = pair[1] if pair[0] == p.subj else pair[0]
    h = Sentence(other, p.verb, p.obj, p.loc)
    return h, f"A {p.subj} is not a {other}."


def neutral(p, rng):
    if p.loc is None:
        loc = rng.choice(LOCATIONS)
        h = Sentence(p.subj, p.verb, p.obj, loc)
        return h, f"Not every {p.subj} who is {p.verb} is {loc[0]} the {loc[1]}."
    if p.verb in OBJECTS and p.obj is None:
        obj = rng.choice(OBJECTS[p.verb])
        h = Sentence(p.subj, p.verb, obj)
        return h, f"{p.verb.capitalize()} does not imply {p.verb} a {obj}."
    cloth = rng.choice(CLOTHING)
    h = Sentence(p.subj, p.verb, cloth=cloth, subj_adj="tall" if rng.random() < 0.5 else None)
    return h, f"There is no indication that the {p.subj} wears a {cloth[0]} {cloth[1]}."


def llm_completion(gold_label, gold_nle, rng):
    label = gold_label
    if rng.random() < 0.15:
        label = rng.choice([l for l in ("entailment", "neutral", "contradiction") if l != gold_label])
        nle = "The two sentences describe different situations." if label == "contradiction" else \
            "The hypothesis adds details that are not in the premise." if label == "neutral" else \
            "The premise describes the same scene as the hypothesis."
    else:
        nle = gold_nle
    return f" {label}\nExplanation: {nle}"


def tokenize(text):
    out = []
    for w in text.lower().split():
        w = w.strip(".,;:!?\"'()")
        if w:
            out.append(w)
    return out


def embeddings(vocab, rng):
    clusters = [
        {"man", "woman", "boy", "girl", "person", "child", "people", "guy"},
        {"dog", "cat", "animal"},
        {"sleeping", "sleep", "resting", "rest", "sitting", "sit", "standing", "stand"},
        {"running", "run", "walking", "walk", "jumping", "jump", "dancing", "dance", "exercising", "exercise",
         "moving", "move", "swimming", "swim"},
        {"eating", "eat", "cooking", "cook", "sandwich", "pizza", "dinner", "pasta"},
        {"playing", "play", "guitar", "ball", "reading", "read", "book", "newspaper"},
        {"couch", "kitchen", "table", "treadmill", "stage"},
        {"beach", "street", "park", "pool", "grass"},
        {"shirt", "hat", "jacket", "dress", "red", "blue", "black", "green", "wears", "tall"},
    ]
    centre = {}
    for c in clusters:
        base = [rng.gauss(0, 1) for _ in range(DIM)]
        for w in c:
            centre[w] = base
    lines = []
    for w in sorted(vocab):
        base = centre.get(w)
        vec = [(b if base else 0.0) + rng.gauss(0, 0.6 if base else 1.0) for b in (base or [0.0] * DIM)]
        lines.append(w + " " + " ".join(f"{x:.5f}" for x in vec))
    return f"{len(lines)} {DIM}\n" + "\n".join(lines) + "\n"


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixture"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    parses, pairs, replay = [], [], []
    makers = {"entailment": entailment, "contradiction": contradiction, "neutral": neutral}
    labels = ["entailment", "contradiction", "neutral"] * 14
    rng.shuffle(labels)
    n = 0
    for label in labels:
        n += 1
        p = premise(rng)
        h, nle = makers[label](p, rng)
        pairs.append((f"pair-{n:03d}", p, h, label, nle))

    inadmissible = [
        (Coordinated("subjects", "man", "woman", "walking", loc=("in", "park")), Sentence("person", "walking"),
         "entailment", "A man and a woman are people."),
        (Coordinated("verbs", "boy", None, "sitting", "reading"), Sentence("boy", "sleeping"),
         "contradiction", "The boy cannot read while sleeping."),
        (Coordinated("subjects", "dog", "cat", "running", loc=("on", "grass")), Sentence("dog", "sleeping"),
         "contradiction", "The dog cannot be running and sleeping."),
        (Coordinated("verbs", "woman", None, "cooking", "dancing"), Sentence("woman", "cooking", loc=("in", "kitchen")),
         "neutral", "The woman could be cooking anywhere."),
        (Coordinated("subjects", "boy", "girl", "swimming", loc=("in", "pool")), Sentence("child", "swimming"),
         "entailment", "A boy and a girl are children."),
        (Coordinated("verbs", "man", None, "standing", "eating"), Sentence("man", "eating", "pizza"),
         "neutral", "The man may be eating something other than pizza."),
        (Coordinated("subjects", "girl", "dog", "playing", loc=("on", "beach")), Sentence("girl", "playing", "ball"),
         "neutral", "They might not be playing with a ball."),
        (Coordinated("verbs", "girl", None, "jumping", "dancing"), Sentence("girl", "sleeping"),
         "contradiction", "A girl cannot jump and sleep at once."),
    ]
    for p, h, label, nle in inadmissible:
        n += 1
        pairs.append((f"pair-{n:03d}", p, h, label, nle))
    order = list(range(len(pairs)))
    rng.shuffle(order)
    pairs = [pairs[i] for i in order]

    vocab = set()
    pair_lines = []
    unparseable = pairs[7][0]
    for pid, p, h, label, nle in pairs:
        parses.append(p.conllu(pid + "-p"))
        parses.append(h.conllu(pid + "-h"))
        pair_lines.append(json.dumps({
            "id": pid, "premise": p.text(), "hypothesis": h.text(), "label": label, "gold_nle": nle,
            "premise_parse_id": pid + "-p", "hypothesis_parse_id": pid + "-h"}))
        response = " I am not able to decide this one." if pid == unparseable else llm_completion(label, nle, rng)
        replay.append(json.dumps({"premise": p.text(), "hypothesis": h.text(), "response": response}))
        for text in (p.text(), h.text(), nle, response):
            vocab.update(tokenize(text))

    shots = [
        ("A man is playing a guitar on stage.", "A person is playing music.", "entailment",
         "Playing a guitar is playing music."),
        ("A girl is jumping in a pool.", "A child is in the water.", "entailment", "A pool holds water."),
        ("A dog is running on the beach.", "An animal is outside.", "entailment", "A beach is outside."),
        ("A woman is sleeping on a couch.", "A woman is running.", "contradiction",
         "She cannot sleep and run at the same time."),
        ("A boy is eating pizza.", "A girl is eating pizza.", "contradiction", "A boy is not a girl."),
        ("A man is sitting in the kitchen.", "A man is in the park.", "contradiction",
         "The kitchen is not the park."),
        ("A man is walking.", "A man is walking to work.", "neutral", "He might not be going to work."),
        ("A woman is reading a book.", "A woman is reading a novel.", "neutral", "Not every book is a novel."),
        ("A dog is sleeping.", "A dog is sleeping in the sun.", "neutral", "The dog may be in the shade."),
    ]
    shot_lines = []
    for i, (pt, ht, label, nle) in enumerate(shots, 1):
        shot_lines.append(json.dumps({"id": f"shot-{i:02d}", "premise": pt, "hypothesis": ht, "label": label,
                                      "gold_nle": nle, "premise_parse_id": f"shot-{i:02d}-p",
                                      "hypothesis_parse_id": f"shot-{i:02d}-h"}))
        vocab.update(tokenize(pt + " " + ht + " " + nle))
    # words of the surrogate's explanation templates
    vocab.update(tokenize("is not the same as if the subject verb object location clothing of sentence 1 2 "
                          "then cannot be has to there no indication that and"))

    (out / "parses.conllu").write_text("\n".join(parses))
    (out / "pairs.jsonl").write_text("\n".join(pair_lines) + "\n")
    (out / "shots.jsonl").write_text("\n".join(shot_lines) + "\n")
    (out / "llm_replay.jsonl").write_text("\n".join(replay) + "\n")
    (out / "embeddings.txt").write_text(embeddings(vocab, random.Random(SEED + 1)))
    print(f"{len(pairs)} pairs, {len(vocab)} words written to {out}")


if __name__ == "__main__":
    main()
