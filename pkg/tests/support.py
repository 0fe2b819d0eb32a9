"""Shared fixtures and independent oracles for the test suite."""
import itertools
import random
from dataclasses import replace

from alp.grammar import Grammar, parse_rule_line, parse_tree
from alp.lexicalizer import subtree_sites
from alp.lexicon import DEFAULT_POS_MAP, parse_lexicon, synonyms
from alp.toydata import REVIEW_LEXICON_TSV, random_grammar

AB_SENTENCES = [s for n in range(1, 8) for s in itertools.product(("a", "b"), repeat=n)]


def grammar_from_text(text, start="S"):
    rules = [parse_rule_line(l) for l in text.splitlines() if l.strip()]
    return Grammar(rules, start=start)


def total_parses(g, sentences, cap):
    """Number of parses summed over ``sentences`` (capped at ``cap + 1``).

    Counts derivations top-down over substrings without building trees; unary
    chains never revisit a label on the same span, as in the parser.
    """
    by_lhs = {}
    for r in g:
        by_lhs.setdefault(r.lhs, []).append(r.rhs)
    pre = g.preterminals
    memo = {}

    def count(sym, sub, chain):
        key = (sym, sub, chain)
        if key in memo:
            return memo[key]
        total = 0
        for rhs in by_lhs.get(sym, ()):
            if sym in pre:
                total += len(sub) == 1 and sub[0] == rhs[0]
            elif len(rhs) == 1:
                if rhs[0] not in chain and rhs[0] != sym:
                    total += count(rhs[0], sub, chain | {sym})
            else:
                total += split(rhs, sub)
        total = min(total, cap + 1)
        memo[key] = total
        return total

    def split(rhs, sub):
        if len(rhs) == 1:
            return count(rhs[0], sub, frozenset())
        total = 0
        for k in range(1, len(sub) - len(rhs) + 2):
            left = count(rhs[0], sub[:k], frozenset())
            if left:
                total += left * split(rhs[1:], sub[k:])
        return min(total, cap + 1)

    total = 0
    for s in sentences:
        total += count(g.start, tuple(s), frozenset())
        if total > cap:
            break
    return total


def oracle_grammars(n=200, seed=2024, cap=3000):
    """``n`` random toy grammars with between 1 and ``cap`` parses over AB_SENTENCES.

    Grammars with no parses are uninformative and grammars with huge parse
    forests make exhaustive enumeration dominate the suite's runtime.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        g = random_grammar(rng)
        if 1 <= total_parses(g, AB_SENTENCES, cap) <= cap:
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# augmentation fixtures
# ---------------------------------------------------------------------------

TOY_GRAMMAR_TEXT = """\
1.0 S -> NP VP
0.5 NP -> NNS
0.5 NP -> DT NNS
0.5 VP -> VB
0.5 VP -> VB ADVP
1.0 ADVP -> RB
0.5 NNS -> dogs
0.5 NNS -> cats
1.0 DT -> the
0.5 VB -> run
0.5 VB -> sleep
1.0 RB -> quickly
"""

TOY_SENTENCES = [("t0", "dogs run".split()), ("t1", "the cats sleep quickly".split())]

TOY_LEXICON_TSV = "dogs\tnoun\thounds\nrun\tverb\tsprint,dash\nquickly\tadv\tfast\n"

PP_SENTENCES = [
    ("p0", "she saw the man with a telescope".split()),
    ("p1", "she saw a telescope".split()),
]

PP_LEXICON_TSV = "man\tnoun\tguy\nsaw\tverb\twatched\n"


def toy_lexicon():
    return parse_lexicon(TOY_LEXICON_TSV)


def review_lexicon():
    return parse_lexicon(REVIEW_LEXICON_TSV)


def _set_path(tree, path, new):
    if not path:
        return new
    kids = list(tree.children)
    kids[path[0]] = _set_path(kids[path[0]], path[1:], new)
    return replace(tree, children=tuple(kids))


def _disjoint(paths):
    for a, b in itertools.combinations(paths, 2):
        n = min(len(a), len(b))
        if a[:n] == b[:n]:
            return False
    return True


def reachable_set(pools, lex, cfg, pos_map=None):
    """Every token sequence generate() could emit, by exhaustive enumeration.

    Covers all base trees, every set of at most ``max_swaps`` non-overlapping
    sites, every same-label donor (from any sentence), and per leaf every
    keep / synonym / other-pool-word choice.
    """
    pos_map = DEFAULT_POS_MAP if pos_map is None else pos_map
    out = set()
    for _, base in pools.tree_bank:
        sites = subtree_sites(base, cfg.target_labels, cfg.min_span)
        for n in range(cfg.max_swaps + 1):
            for combo in itertools.combinations(sites, n):
                if not _disjoint([p for p, _ in combo]):
                    continue
                donor_lists = [pools.subtree_pool.get(node.label, []) for _, node in combo]
                if any(not d for d in donor_lists):
                    continue
                for donors in itertools.product(*donor_lists):
                    tree = base
                    for (path, _), donor in zip(combo, donors):
                        tree = _set_path(tree, path, donor.tree)
                    options = []
                    for pre in tree.preterminals():
                        word = pre.children[0].word
                        pool = pools.word_pool.get(pre.label)
                        if pool is None:
                            options.append([word])
                            continue
                        opts = {word} | set(synonyms(lex, word, pre.label, pos_map)) | set(pool)
                        options.append(sorted(opts))
                    out.update(itertools.product(*options))
    return out


def pp_tree_a():
    """VP-attachment parse of the PP fixture sentence."""
    return parse_tree(
        "(S (NP (PRP she)) (VP (VP (VB saw) (NP (DT the) (NN man)))"
        " (PP (IN with) (NP (DT a) (NN telescope)))))"
    )
