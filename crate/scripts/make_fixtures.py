#!/usr/bin/env python3
"""Generate the replay transcripts and lexicon fixtures under fixtures/.

Every fixture is deterministic (fixed seed, fixed timestamps). Label
expectations of the engineered corpora are checked here with scipy's
Kruskal-Wallis implementation before anything is written, so the Rust test
suite compares against an independent computation.

Usage: python3 scripts/make_fixtures.py  (from the repository root)
"""

import json
import random
from collections import Counter
from datetime import datetime, timedelta, timezone
from pathlib import Path

import snowballstemmer
from scipy.stats import kruskal

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"
WORDLIST = {
    line.split("\t")[0]
    for line in (ROOT / "crates/core/data/wordlist_en.txt").read_text().splitlines()
}
STEMMER = snowballstemmer.stemmer("english")
BASE_TIME = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)
ALPHA = 0.1


def stem(word):
    return " ".join(STEMMER.stemWord(w) for w in word.lower().replace("-", " ").split())


def association_prompt(cue):
    return (
        f"Write a list of 3 words that come to your mind when you think of {cue} and rate each word "
        "on a scale from 1 (very negative) to 5 (very positive) according to the sentiment the word "
        "inspires in you."
    )


def rating_prompt(cue):
    return (
        f"Rate the word {cue} on a scale from 1 (very negative) to 5 (very positive) according to "
        "the sentiment the word inspires in you. Reply with a single number."
    )


# Reply layouts a chat model plausibly produces; all parse to the same triple.
FORMATS = [
    lambda it: "\n".join(f"{i + 1}. {w} - {s}" for i, (w, s) in enumerate(it)),
    lambda it: ", ".join(f"{w.capitalize()} ({s})" for w, s in it),
    lambda it: "Here are three words:\n" + "\n".join(f"- {w}: {s}/5" for w, s in it),
    lambda it: "\n".join(f"{i + 1}) **{w.capitalize()}** – {s}" for i, (w, s) in enumerate(it)),
    lambda it: "\n\n".join(f"{w.capitalize()}\nRating: {s}" for w, s in it),
    lambda it: "\n".join(f"{w} = {s}" for w, s in it),
]


class Transcript:
    def __init__(self, model_id):
        self.model_id = model_id
        self.entries = []

    def add(self, cue, prompt, reply, status):
        seq = len(self.entries)
        self.entries.append(
            {
                "sequence": seq,
                "cue": cue,
                "prompt": prompt,
                "raw_reply": reply,
                "model_id": self.model_id,
                "timestamp": (BASE_TIME + timedelta(seconds=seq)).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "parse_status": status,
            }
        )

    def rating(self, cue, score, text=None):
        self.add(cue, rating_prompt(cue), text or str(score), "cue_rating")

    def reply(self, cue, items, fmt_index, status="accepted"):
        self.add(cue, association_prompt(cue), FORMATS[fmt_index % len(FORMATS)](items), status)

    def write(self, path):
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as f:
            for e in self.entries:
                f.write(json.dumps(e, ensure_ascii=False) + "\n")


def fill_records(counts, n_records):
    """Spread stems over records, three distinct stems per record."""
    remaining = dict(counts)
    assert sum(remaining.values()) == 3 * n_records
    records = []
    for _ in range(n_records):
        picks = sorted(remaining, key=lambda w: (-remaining[w], w))[:3]
        assert len(picks) == 3 and all(remaining[p] > 0 for p in picks)
        for p in picks:
            remaining[p] -= 1
        records.append(picks)
    assert all(v == 0 for v in remaining.values())
    return records


def check_labels(samples, cue_ratings, expected):
    """Label every stem against the pooled complement with scipy."""
    pool = [s for scores in samples.values() for s in scores]
    pool += [s for scores in cue_ratings.values() for s in scores]
    all_samples = dict(samples)
    for cue, scores in cue_ratings.items():
        all_samples.setdefault(stem(cue), []).extend(scores)
    for key, want in expected.items():
        own = all_samples[key]
        rest = Counter(pool)
        rest.subtract(Counter(own))
        complement = list(rest.elements())
        _, p = kruskal(own, complement)
        mean_own = sum(own) / len(own)
        mean_rest = sum(complement) / len(complement)
        if p >= ALPHA:
            got = "neutral"
        else:
            got = "negative" if mean_own < mean_rest else "positive"
        assert got == want, (key, got, want, p)


def gpt3_math():
    """Frame measures engineered to one reference row of frame statistics."""
    # (word, multiplicity, score, emotional?) per label; multiplicities sum to 477.
    positive = [("logic", 16, 5, False), ("precision", 15, 5, False)]
    neutral = [
        ("numbers", 20, 3, False), ("equations", 17, 3, False),
        ("algebra", 15, 3, False), ("geometry", 13, 3, False),
        ("challenge", 18, 3, True), ("calculation", 16, 3, True),
        ("problem", 16, 3, True), ("homework", 15, 3, True),
        ("exam", 14, 3, True), ("grade", 13, 3, True),
    ]
    negative = [
        ("formula", 20, 1, False), ("fraction", 18, 1, False), ("theorem", 16, 1, False),
        ("variable", 14, 1, False), ("calculus", 12, 1, False),
        ("anxiety", 30, 1, True), ("stress", 25, 1, True), ("fear", 22, 1, True),
        ("frustration", 20, 1, True), ("confusion", 18, 1, True), ("failure", 16, 1, True),
        ("boredom", 15, 1, True), ("difficulty", 14, 1, True), ("panic", 13, 1, True),
        ("dread", 11, 1, True), ("pressure", 10, 1, True), ("tedious", 8, 1, True),
        ("headache", 7, 1, True),
    ]
    math_items = positive + neutral + negative
    assert len(math_items) == 30
    assert sum(m for _, m, _, _ in math_items) == 477
    # A second cue balances the pooled distribution so that 3 sits at its center.
    art_items = [
        ("beauty", 40, 5), ("creativity", 36, 5), ("color", 34, 5), ("painting", 32, 5),
        ("museum", 30, 5), ("expression", 30, 5), ("imagination", 28, 5), ("inspiration", 28, 5),
        ("canvas", 40, 3), ("brush", 38, 3), ("gallery", 37, 3), ("sculpture", 36, 3),
        ("sketch", 35, 3), ("pencil", 33, 3),
    ]
    assert sum(m for _, m, _ in art_items) == 477
    math_ratings = [1, 1] + [2] * 8
    art_ratings = [5] * 6 + [4] * 4

    words = [w for w, *_ in math_items] + [w for w, *_ in art_items]
    assert all(w in WORDLIST for w in words), [w for w in words if w not in WORDLIST]
    stems = [stem(w) for w in words]
    assert len(set(stems)) == len(stems) and "math" not in stems and "art" not in stems

    samples = {stem(w): [s] * m for w, m, s, _ in math_items}
    samples.update({stem(w): [s] * m for w, m, s in art_items})
    expected = {stem(w): {5: "positive", 3: "neutral", 1: "negative"}[s] for w, _, s, _ in math_items}
    expected["math"] = "negative"
    check_labels(samples, {"math": math_ratings, "art": art_ratings}, expected)

    # Surface variants that normalization must merge back onto one stem.
    variants = {"numbers": ["Number", "numbers"], "equations": ["equation", "Equations"],
                "fraction": ["fractions", "fraction"]}
    score_of = {w: s for w, _, s, _ in math_items}
    score_of.update({w: s for w, _, s in art_items})

    t = Transcript("synthetic-gpt3")
    for cue, ratings, items in (("math", math_ratings, math_items), ("art", art_ratings, art_items)):
        for r in ratings:
            t.rating(cue, r)
        counts = {w: m for w, m, *_ in items}
        seen = Counter()
        for i, rec in enumerate(fill_records(counts, 159)):
            triple = []
            for w in rec:
                forms = variants.get(w, [w])
                triple.append((forms[seen[w] % len(forms)], score_of[w]))
                seen[w] += 1
            t.reply(cue, triple, i)
    t.write(OUT / "gpt3-math/transcript.jsonl")

    basic = ["fear", "sadness", "anticipation", "anger"]
    with (OUT / "gpt3-math/emolex.tsv").open("w") as f:
        for i, (w, _, _, emotional) in enumerate(math_items):
            for emo in ["anger", "anticipation", "disgust", "fear", "joy", "sadness",
                        "surprise", "trust", "negative", "positive"]:
                flag = int(emotional and emo == basic[i % len(basic)])
                # Sentiment-only flags do not make a word emotional.
                if not emotional and emo == "negative" and score_of[w] == 1:
                    flag = 1
                f.write(f"{w}\t{emo}\t{flag}\n")


def compliance():
    """167 replies for one cue, 8 of which repeat the cue in some form."""
    rng = random.Random(7)
    vocab = ["numbers", "logic", "algebra", "geometry", "proof", "fear", "homework", "puzzle",
             "calculus", "fraction", "teacher", "exam", "pattern", "symmetry", "infinity"]
    repeats = {10: "math", 31: "maths", 55: "Math", 77: "maths", 98: "math",
               120: "maths", 141: "MATH", 160: "math"}
    t = Transcript("synthetic-compliance")
    t.rating("math", 2)
    for i in range(167):
        words = rng.sample(vocab, 3)
        items = [(w, rng.randint(1, 5)) for w in words]
        status = "accepted"
        if i in repeats:
            items[rng.randrange(3)] = (repeats[i], rng.randint(1, 5))
            if stem(repeats[i]) == "math":
                status = "discarded_repetition"
        t.reply("math", items, i, status)
    accepted = sum(e["parse_status"] == "accepted" for e in t.entries)
    discarded = sum(e["parse_status"] == "discarded_repetition" for e in t.entries)
    assert (accepted, discarded) == (159, 8), (accepted, discarded)
    assert t.entries[-1]["parse_status"] == "accepted"
    t.write(OUT / "compliance/transcript.jsonl")


def serenity():
    """A calm, pleasant frame whose density sits in the lower-right quadrant."""
    calm = {"calm": (0.83, 0.12), "peace": (0.9, 0.15), "relax": (0.85, 0.1), "garden": (0.8, 0.25),
            "breeze": (0.78, 0.2), "lake": (0.72, 0.18), "quiet": (0.7, 0.08), "sunset": (0.86, 0.27),
            "meadow": (0.76, 0.14), "gentle": (0.8, 0.2)}
    other = {"storm": (0.3, 0.8), "hike": (0.7, 0.6)}
    rng = random.Random(11)
    lex = {**calm, **other}
    t = Transcript("synthetic-serenity")
    t.rating("nature", 5)
    pool = list(calm) * 4 + list(other)
    for i in range(30):
        words = []
        while len(words) < 3:
            w = rng.choice(pool)
            if w not in words:
                words.append(w)
        t.reply("nature", [(w, 5 if w in calm else 3) for w in words], i)
    t.write(OUT / "serenity/transcript.jsonl")
    with (OUT / "serenity/vad.tsv").open("w") as f:
        f.write("word\tvalence\tarousal\tdominance\n")
        for w, (v, a) in sorted(lex.items()):
            f.write(f"{w}\t{v:.3f}\t{a:.3f}\t0.500\n")


def desk_scale():
    """Ten cues with 159 accepted replies each over a shared vocabulary."""
    rng = random.Random(2024)
    cues = ["math", "physics", "science", "teacher", "scientist", "school", "biology", "art",
            "chemistry", "stem"]
    vocab = sorted(
        w for w in WORDLIST
        if w.isalpha() and 5 <= len(w) <= 9 and all(stem(w) != stem(c) for c in cues)
    )
    vocab = rng.sample(vocab, 400)
    keys = sorted(set(stem(w) for w in vocab))
    by_stem = {}
    for w in vocab:
        by_stem.setdefault(stem(w), w)
    vocab = [by_stem[k] for k in keys]
    t = Transcript("synthetic-desk")
    for c_i, cue in enumerate(cues):
        t.rating(cue, rng.randint(1, 5))
        local = rng.sample(vocab, 60)
        bias = rng.randint(1, 5)
        for i in range(159):
            words = rng.sample(local[: 20 + (i % 40)], 3)
            items = [(w, min(5, max(1, bias + rng.randint(-2, 2)))) for w in words]
            t.reply(cue, items, i + c_i)
    t.write(OUT / "desk/transcript.jsonl")
    with (OUT / "desk/vad.tsv").open("w") as f:
        f.write("word\tvalence\tarousal\tdominance\n")
        for w in vocab:
            if rng.random() < 0.8:
                f.write(f"{w}\t{rng.random():.3f}\t{rng.random():.3f}\t{rng.random():.3f}\n")
    with (OUT / "desk/emolex.tsv").open("w") as f:
        for w in vocab:
            for emo in ["anger", "anticipation", "disgust", "fear", "joy", "sadness",
                        "surprise", "trust", "negative", "positive"]:
                f.write(f"{w}\t{emo}\t{int(rng.random() < 0.08)}\n")


def parser_cases():
    ok = [
        ("1. numbers - 2\n2. equations - 1\n3. logic - 4", [["numbers", 2], ["equations", 1], ["logic", 4]]),
        ("Anxiety (1), Homework (2), Puzzle (4)", [["anxiety", 1], ["homework", 2], ["puzzle", 4]]),
        ("1) Numbers: 3\n2) Logic: 4\n3) Stress: 1", [["numbers", 3], ["logic", 4], ["stress", 1]]),
        ("- Numbers: 3/5\n- Logic: 4/5\n- Stress: 1/5", [["numbers", 3], ["logic", 4], ["stress", 1]]),
        ("**Numbers** – 3\n**Logic** – 4\n**Stress** – 1", [["numbers", 3], ["logic", 4], ["stress", 1]]),
        ("1. Problem-solving - 4\n2. Equations - 3\n3. Frustration - 2",
         [["problem solving", 4], ["equations", 3], ["frustration", 2]]),
        ("Numbers\nRating: 3\n\nLogic\nRating: 4\n\nStress\nRating: 1", [["numbers", 3], ["logic", 4], ["stress", 1]]),
        ("numbers = 3\nlogic = 4\nstress = 1", [["numbers", 3], ["logic", 4], ["stress", 1]]),
        ("Sure! Here are three words:\n\n1. Curiosity - 5\n2. Experiment - 4\n3. Lab - 3",
         [["curiosity", 5], ["experiment", 4], ["lab", 3]]),
        ("1. Cafeteria food - 2\n2. Friends - 5\n3. Homework - 2",
         [["cafeteria food", 2], ["friends", 5], ["homework", 2]]),
        ("1. Discovery (5)\n2. Research (4)\n3. Laboratory (3)",
         [["discovery", 5], ["research", 4], ["laboratory", 3]]),
        ("Creativity: 5, Colors: 5, Museum: 4", [["creativity", 5], ["colors", 5], ["museum", 4]]),
        ("1. Atoms - 3 (they are the building blocks)\n2. Energy - 4 (powerful)\n3. Gravity - 3",
         [["atoms", 3], ["energy", 4], ["gravity", 3]]),
        ("1. Knowledge - Rating: 5\n2. Mentor - Rating: 4\n3. Grades - Rating: 2",
         [["knowledge", 5], ["mentor", 4], ["grades", 2]]),
        ("Knowledge (rating: 5); Mentor (rating: 4); Grades (rating: 2)",
         [["knowledge", 5], ["mentor", 4], ["grades", 2]]),
        ("• Cells – 3\n• Evolution – 4\n• Dissection – 2", [["cells", 3], ["evolution", 4], ["dissection", 2]]),
        ("1. Reactions: 4.\n2. Explosions: 2.\n3. Periodic table: 3.",
         [["reactions", 4], ["explosions", 2], ["periodic table", 3]]),
        ("Innovation - 5\nEngineering - 4\nCoding - 4", [["innovation", 5], ["engineering", 4], ["coding", 4]]),
        ("1. Numbers — 3\n2. Logic — 4\n3. Anxiety — 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("| Word | Rating |\n|---|---|\n| Numbers | 3 |\n| Logic | 4 |\n| Anxiety | 1 |",
         [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. \"Numbers\" - 3\n2. \"Logic\" - 4\n3. \"Anxiety\" - 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("Words:\n1.Numbers - 3\n2.Logic - 4\n3.Anxiety - 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("Numbers 3, Logic 4, Anxiety 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. numbers, 3\n2. logic, 4\n3. anxiety, 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. Trial-and-error - 2\n2. Hypothesis - 4\n3. Microscope - 3",
         [["trial and error", 2], ["hypothesis", 4], ["microscope", 3]]),
        ("1. NUMBERS - 3\n2. LOGIC - 4\n3. ANXIETY - 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. Numbers: score 3\n2. Logic: score 4\n3. Anxiety: score 1", [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("  1.   Numbers   -   3  \n  2.   Logic   -   4  \n  3.   Anxiety   -   1  ",
         [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. Numbers - 3! \n2. Logic - 4\n3. Anxiety - 1. I find it scary.",
         [["numbers", 3], ["logic", 4], ["anxiety", 1]]),
        ("1. Café - 4\n2. Naïve - 2\n3. Résumé - 3", [["café", 4], ["naïve", 2], ["résumé", 3]]),
    ]
    bad = [
        ("I love math!", "found 0"),
        ("", "found 0"),
        ("1. numbers - 2\n2. logic - 4", "found 2"),
        ("1. a - 1\n2. b - 2\n3. c - 3\n4. d - 4", "found 4"),
        ("1. numbers - 7\n2. logic - 4\n3. fear - 1", "outside"),
        ("1. numbers - 0\n2. logic - 4\n3. fear - 1", "outside"),
        ("1. numbers - 2.5\n2. logic - 4\n3. fear - 1", "non-integer"),
        ("numbers, logic, fear", "found 0"),
        ("As an AI language model, I do not have feelings about words.", "found 0"),
        ("1. numbers - 3\n2. logic - 4\n3. fear - 10", "outside"),
    ]
    assert len(ok) == 30 and len(bad) == 10
    doc = {
        "well_formed": [{"reply": r, "expected": e} for r, e in ok],
        "malformed": [{"reply": r, "reason_contains": why} for r, why in bad],
    }
    (OUT / "parser").mkdir(parents=True, exist_ok=True)
    (OUT / "parser/cases.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    gpt3_math()
    compliance()
    serenity()
    desk_scale()
    parser_cases()
    print("fixtures written to", OUT)
