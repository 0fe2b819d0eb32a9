"""Small synthetic resources for demos, tests and benchmarks.

* ``PP_GRAMMAR``: the prepositional-phrase attachment grammar used
  throughout the docs ("she saw the man with a telescope").
* ``random_grammar``: random small PCFGs for oracle comparisons.
* ``review_treebank`` / ``review_lexicon``: a templated two-class corpus of
  movie-review sentences with gold bracketings and a synonym lexicon.
"""
import json
import random
from pathlib import Path

from .grammar import Grammar, Rule, parse_rule_line, parse_tree

PP_GRAMMAR_TEXT = """\
1.0 S -> NP VP
0.6 VP -> VB NP
0.3 VP -> VP PP
0.1 VP -> VB
0.6 NP -> DT NN
0.2 NP -> NP PP
0.2 NP -> PRP
1.0 PP -> IN NP
1.0 PRP -> she
1.0 VB -> saw
0.5 DT -> the
0.5 DT -> a
0.5 NN -> man
0.5 NN -> telescope
1.0 IN -> with
"""

PP_SENTENCE = "she saw the man with a telescope".split()


def pp_grammar():
    return Grammar([parse_rule_line(line) for line in PP_GRAMMAR_TEXT.splitlines()], start="S")


def _normalized(rng, n):
    w = [rng.uniform(0.05, 1.0) for _ in range(n)]
    total = sum(w)
    probs = [x / total for x in w]
    probs[-1] = 1.0 - sum(probs[:-1])
    return probs


def random_grammar(rng, nonterminals=("S", "A", "B"), preterminals=("X", "Y"),
                   terminals=("a", "b"), max_rules=30, max_rank=3):
    """A random PCFG in which every symbol on a right-hand side has rules.

    Unary rules between nonterminals are allowed, including cycles.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    lexical = {p: set() for p in preterminals}
    for t in terminals:
        lexical[rng.choice(preterminals)].add(t)
    for p in preterminals:
        if not lexical[p] or rng.random() < 0.3:
            lexical[p].add(rng.choice(terminals))
    rules = []
    for p in preterminals:
        words = sorted(lexical[p])
        rules.extend(Rule(p, (w,), q) for w, q in zip(words, _normalized(rng, len(words))))
    symbols = list(nonterminals) + list(preterminals)
    budget = max_rules - len(rules)
    per_nt = max(1, budget // len(nonterminals))
    for nt in nonterminals:
        seen = set()
        n = rng.randint(1, min(4, per_nt))
        while len(seen) < n:
            rank = rng.randint(1, max_rank)
            rhs = tuple(rng.choice(symbols) for _ in range(rank))
            if rhs == (nt,):
                continue
            seen.add(rhs)
        ordered = sorted(seen)
        rules.extend(Rule(nt, rhs, q) for rhs, q in zip(ordered, _normalized(rng, len(ordered))))
    return Grammar(rules, start=nonterminals[0])


# ---------------------------------------------------------------------------
# Review corpus
# ---------------------------------------------------------------------------

_WORDS = {
    "pos": {
        "NN": ["movie", "film", "plot", "story", "cast", "script", "score", "director"],
        "NNS": ["characters", "actors", "scenes", "jokes", "songs"],
        "JJ": ["great", "wonderful", "clever", "moving", "funny", "brilliant"],
        "VBD": ["loved", "enjoyed", "admired", "praised"],
        "VBZ": ["shines", "delights", "works", "succeeds"],
        "RB": ["truly", "really", "very", "quite"],
    },
    "neg": {
        "NN": ["movie", "film", "plot", "story", "ending", "script", "dialogue", "pacing"],
        "NNS": ["characters", "actors", "scenes", "jokes", "effects"],
        "JJ": ["boring", "dull", "awful", "clumsy", "tedious", "weak"],
        "VBD": ["hated", "disliked", "regretted", "endured"],
        "VBZ": ["fails", "drags", "bores", "disappoints"],
        "RB": ["truly", "really", "very", "quite"],
    },
}

_SHARED = {
    "DT": ["the", "a", "this", "that"],
    "PRP": ["i", "we", "she", "he"],
    "IN": ["with", "in", "about", "for"],
}


def _np(rng, w, depth=0):
    det = rng.choice(_SHARED["DT"])
    r = rng.random()
    if r < 0.35:
        core = f"(NP (DT {det}) (JJ {rng.choice(w['JJ'])}) (NN {rng.choice(w['NN'])}))"
    elif r < 0.6:
        core = f"(NP (DT the) (NNS {rng.choice(w['NNS'])}))"
    else:
        core = f"(NP (DT {det}) (NN {rng.choice(w['NN'])}))"
    if depth < 2 and rng.random() < 0.2:
        return f"(NP {core} {_pp(rng, w, depth + 1)})"
    return core


def _pp(rng, w, depth=0):
    return f"(PP (IN {rng.choice(_SHARED['IN'])}) {_np(rng, w, depth)})"


def _vp(rng, w, depth=0):
    r = rng.random()
    if r < 0.4:
        vp = f"(VP (VBD {rng.choice(w['VBD'])}) {_np(rng, w, depth)})"
    elif r < 0.7:
        vp = f"(VP (VBZ {rng.choice(w['VBZ'])}))"
    else:
        vp = (f"(VP (VBZ {rng.choice(w['VBZ'])}) "
              f"(ADVP (RB {rng.choice(w['RB'])})))")
    if depth < 2 and rng.random() < 0.25:
        vp = f"(VP {vp} {_pp(rng, w, depth + 1)})"
    return vp


def review_tree(rng, label, long=False):
    """One bracketed sentence of class ``label`` ("pos" or "neg").

    With ``long=True`` the predicate is a coordination of verb phrases and
    the sentence has 25 to 40 tokens.
    """
    w = _WORDS[label]
    if rng.random() < 0.3:
        subj = f"(NP (PRP {rng.choice(_SHARED['PRP'])}))"
    else:
        subj = _np(rng, w)
    if not long:
        return parse_tree(f"(S {subj} {_vp(rng, w)} (. .))")
    while True:
        target = rng.randint(25, 40)
        parts = [_vp(rng, w)]
        tree = None
        while tree is None or len(tree.words()) < target:
            parts.append("(CC and)")
            parts.append(_vp(rng, w))
            tree = parse_tree(f"(S {subj} (VP {' '.join(parts)}) (. .))")
        if len(tree.words()) <= 40:
            return tree


def review_treebank(n_per_class=30, seed=0):
    """``[(label, tree), ...]`` alternating classes; deterministic in ``seed``."""
    rng = random.Random(seed)
    out = []
    for _ in range(n_per_class):
        for label in ("pos", "neg"):
            out.append((label, review_tree(rng, label)))
    return out


REVIEW_LEXICON_TSV = """\
movie\tnoun\tfilm,picture,flick
film\tnoun\tmovie,picture
plot\tnoun\tstoryline,narrative
story\tnoun\ttale,narrative
script\tnoun\tscreenplay
characters\tnoun\tpersonalities,roles
actors\tnoun\tperformers,players
scenes\tnoun\tsequences,episodes
jokes\tnoun\tgags,quips
ending\tnoun\tfinale,conclusion
director\tnoun\tfilmmaker
great\tadj\tgood,superb,fine
wonderful\tadj\tmarvelous,fantastic
clever\tadj\tsmart,witty
funny\tadj\tamusing,comic
boring\tadj\tuninteresting,tiresome
dull\tadj\tflat,lifeless
awful\tadj\tterrible,dreadful
weak\tadj\tfeeble,thin
loved\tverb\tadored,cherished
enjoyed\tverb\trelished,savored
hated\tverb\tdetested,loathed
disliked\tverb\tresented
truly\tadv\tgenuinely,really
really\tadv\ttruly,actually
very\tadv\textremely,highly
quite\tadv\trather,fairly
"""


def write_review_corpus(directory, n_per_class=30, seed=0):
    """Write ``treebank.txt``, ``reviews.jsonl`` and ``lexicon.tsv``; return their paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tb = review_treebank(n_per_class, seed)
    paths = {
        "treebank": directory / "treebank.txt",
        "dataset": directory / "reviews.jsonl",
        "lexicon": directory / "lexicon.tsv",
    }
    paths["treebank"].write_text("".join(t.to_bracket() + "\n" for _, t in tb), encoding="utf-8")
    rows = [json.dumps({"id": f"r{i:03d}", "text": " ".join(t.words()), "label": label}) + "\n"
            for i, (label, t) in enumerate(tb)]
    paths["dataset"].write_text("".join(rows), encoding="utf-8")
    paths["lexicon"].write_text(REVIEW_LEXICON_TSV, encoding="utf-8")
    return {k: str(v) for k, v in paths.items()}
