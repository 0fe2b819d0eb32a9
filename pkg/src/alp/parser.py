"""Threshold-filtered k-best CKY parsing.

The chart is built over a binarized grammar.  Unary rules are handled by
precomputing every acyclic unary chain ``A -> X1 -> ... -> B`` and applying
the whole chain as one hyperedge on top of the items a cell derives through
lexical or binary rules; a derivation therefore never repeats a label along a
unary chain on the same span.  k-best trees are read off the resulting
acyclic hypergraph with lazy successor expansion (Huang & Chiang 2005,
algorithm 3).

Threshold semantics.  A rule is *low* when its probability is ``<= tau``.
Following the PP-attachment example the threshold is applied to the rules on
which competing analyses of the sentence differ: a low rule is allowed only if
every parse of the sentence uses it.  A tree survives iff all the low rules
it uses are shared by all parses.  When the sentence has a single analysis
nothing is contested and that analysis is always returned.  Synthetic
unknown-word rules are never low.
"""
import heapq
import itertools
import math
from dataclasses import dataclass, replace

from .errors import OracleBoundError, ParseError
from .grammar import MARKER, ParseTree, leaf

ORACLE_MAX_LEN = 8
ORACLE_MAX_RULES = 60

_TIE_EPS = 1e-9


@dataclass(frozen=True)
class ParserConfig:
    tau: float = 0.05
    k_best: int = 10
    max_len: int = 64
    unknown_words: bool = True

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ValueError(f"tau must lie in [0, 1), got {self.tau}")
        if self.k_best < 1:
            raise ValueError(f"k_best must be >= 1, got {self.k_best}")
        if self.max_len < 1:
            raise ValueError(f"max_len must be >= 1, got {self.max_len}")


class _Compiled:
    """Rule indexes of a binarized grammar, built once per grammar."""

    def __init__(self, g):
        self.start = g.start
        self.probs = []  # rule id -> probability
        self.lex = {}  # word -> [(pos, logp, rid)]
        self.by_left = {}  # B -> [(C, A, logp, rid)]
        unary = {}  # B -> [(A, logp, rid)]
        for rid, r in enumerate(g):
            self.probs.append(r.prob)
            lp = math.log(r.prob)
            if r.lhs in g.preterminals:
                self.lex.setdefault(r.rhs[0], []).append((r.lhs, lp, rid))
            elif len(r.rhs) == 2:
                self.by_left.setdefault(r.rhs[0], []).append((r.rhs[1], r.lhs, lp, rid))
            else:
                unary.setdefault(r.rhs[0], []).append((r.lhs, lp, rid))
        # every pos that rewrites to at least one training word
        self.unk_tags = sorted(g.preterminals)
        self.unk_logp = -math.log(len(self.unk_tags)) if self.unk_tags else None
        self.paths = self._unary_paths(unary)

    @staticmethod
    def _unary_paths(unary):
        """B -> list of (labels A..B, logp, rids) over all acyclic unary chains."""
        paths = {}
        for bottom in unary:
            found = []
            stack = [((bottom,), 0.0, ())]
            while stack:
                labels, lp, rids = stack.pop()
                for parent, rlp, rid in unary.get(labels[0], ()):
                    if parent in labels:
                        continue
                    entry = ((parent,) + labels, lp + rlp, (rid,) + rids)
                    found.append(entry)
                    stack.append(entry)
            found.sort(key=lambda e: (len(e[0]), e[0]))
            paths[bottom] = found
        return paths


def _compiled(g):
    comp = g.__dict__.get("_alp_compiled")
    if comp is None:
        comp = _Compiled(g)
        g.__dict__["_alp_compiled"] = comp
    return comp


class _Item:
    __slots__ = ("label", "i", "j", "edges", "best", "alive", "D", "cand", "seen", "low")

    def __init__(self, label, i, j):
        self.label = label
        self.i = i
        self.j = j
        self.edges = []
        self.best = -math.inf
        self.alive = True
        self.D = None
        self.cand = None
        self.seen = None
        self.low = frozenset()


# edge = (logp, tails, kind, payload, rids)
#   kind "lex": payload = (word, prob, synthetic)
#   kind "bin": payload = prob
#   kind "un":  payload = (labels, probs)   labels run from the top label down to the tail's
#   kind "id":  payload = None


class _Chart:
    def __init__(self, tokens, comp, unknown_words):
        self.tokens = tokens
        self.comp = comp
        self.items = []  # creation order is a topological order
        self.built = {}
        n = len(tokens)
        self.cells = {}
        for i, word in enumerate(tokens):
            base = {}
            entries = comp.lex.get(word)
            if entries:
                for pos, lp, rid in entries:
                    it = self._item(base, pos, i, i + 1)
                    it.edges.append((lp, (), "lex", (word, math.exp(lp), False), (rid,)))
            elif unknown_words and comp.unk_logp is not None:
                prob = 1.0 / len(comp.unk_tags)
                for pos in comp.unk_tags:
                    it = self._item(base, pos, i, i + 1)
                    it.edges.append((comp.unk_logp, (), "lex", (word, prob, True), ()))
            self.cells[i, i + 1] = self._close(base, i, i + 1)
        for width in range(2, n + 1):
            for i in range(0, n - width + 1):
                j = i + width
                base = {}
                for k in range(i + 1, j):
                    left = self.cells[i, k]
                    right = self.cells[k, j]
                    if not left or not right:
                        continue
                    for b, litem in left.items():
                        rules = comp.by_left.get(b)
                        if not rules:
                            continue
                        for c, a, lp, rid in rules:
                            ritem = right.get(c)
                            if ritem is None:
                                continue
                            it = self._item(base, a, i, j)
                            it.edges.append((lp, (litem, ritem), "bin", comp.probs[rid], (rid,)))
                self.cells[i, j] = self._close(base, i, j)
        self.root = self.cells[0, n].get(comp.start)

    def _item(self, cell, label, i, j):
        it = cell.get(label)
        if it is None:
            it = _Item(label, i, j)
            cell[label] = it
            self.items.append(it)
        return it

    def _close(self, base, i, j):
        """Apply unary chains on top of the base items of a cell."""
        top = dict(base)
        paths = self.comp.paths
        probs = self.comp.probs
        fresh = {}
        for b, bitem in base.items():
            for labels, lp, rids in paths.get(b, ()):
                a = labels[0]
                it = fresh.get(a)
                if it is None:
                    it = _Item(a, i, j)
                    if a in base:
                        it.edges.append((0.0, (base[a],), "id", None, ()))
                    fresh[a] = it
                it.edges.append((lp, (bitem,), "un", (labels, [probs[r] for r in rids]), rids))
        for a, it in fresh.items():
            self.items.append(it)
            top[a] = it
        return top

    def score(self):
        for it in self.items:
            best = -math.inf
            for lp, tails, _, _, _ in it.edges:
                s = lp + sum(t.best for t in tails)
                if s > best:
                    best = s
            it.best = best
            it.alive = best > -math.inf

    def common_low(self, low):
        """Low rule ids used by every derivation of each item."""
        empty = frozenset()
        for it in self.items:
            acc = None
            for _, tails, _, _, rids in it.edges:
                s = frozenset(r for r in rids if r in low) if rids else empty
                for t in tails:
                    if t.low:
                        s = s | t.low
                acc = s if acc is None else acc & s
                if not acc:
                    break
            it.low = acc or empty

    def ban(self, banned):
        """Drop edges that use a banned rule and rescore."""
        for it in self.items:
            it.edges = [e for e in it.edges if not banned.intersection(e[4])]
        self.score()

    # -- lazy k-best ------------------------------------------------------

    def _edge_score(self, edge, ranks):
        return edge[0] + sum(t.D[r][0] for t, r in zip(edge[1], ranks))

    def kth(self, v, k):
        """Ensure ``v.D`` holds the best ``k + 1`` derivations if that many exist."""
        if v.D is None:
            v.D = []
            v.cand = []
            v.seen = set()
            for ei, edge in enumerate(v.edges):
                if all(t.alive for t in edge[1]):
                    ranks = (0,) * len(edge[1])
                    for t in edge[1]:
                        self.kth(t, 0)
                    v.cand.append((-self._edge_score(edge, ranks), ei, ranks))
                    v.seen.add((ei, ranks))
            heapq.heapify(v.cand)
        while len(v.D) <= k:
            if v.D:
                self._next(v, v.D[-1])
            if not v.cand:
                break
            neg, ei, ranks = heapq.heappop(v.cand)
            v.D.append((-neg, ei, ranks))

    def _next(self, v, deriv):
        _, ei, ranks = deriv
        edge = v.edges[ei]
        for pos, tail in enumerate(edge[1]):
            nranks = ranks[:pos] + (ranks[pos] + 1,) + ranks[pos + 1:]
            self.kth(tail, nranks[pos])
            if nranks[pos] < len(tail.D) and (ei, nranks) not in v.seen:
                v.seen.add((ei, nranks))
                heapq.heappush(v.cand, (-self._edge_score(edge, nranks), ei, nranks))

    def build(self, v, rank):
        """Tree of the ``rank``-th derivation of ``v`` with marker nodes spliced.

        Sub-derivations are shared between k-best trees, so results are
        cached per (item, rank).  A marker item yields ``(children, prob)``
        for its parent to splice in.
        """
        key = (id(v), rank)
        hit = self.built.get(key)
        if hit is not None:
            return hit
        _, ei, ranks = v.D[rank]
        lp, tails, kind, payload, _ = v.edges[ei]
        span = (v.i, v.j)
        if kind == "id":
            out = self.build(tails[0], ranks[0])
        elif kind == "lex":
            word, prob, _ = payload
            out = ParseTree(v.label, span, (leaf(word, v.i),), None, prob)
        elif kind == "bin":
            prob = payload
            kids = []
            for t, r in zip(tails, ranks):
                sub = self.build(t, r)
                if type(sub) is tuple:
                    kids.extend(sub[0])
                    prob *= sub[1]
                else:
                    kids.append(sub)
            if v.label.startswith(MARKER):
                out = (tuple(kids), prob)
            else:
                out = ParseTree(v.label, span, tuple(kids), None, prob)
        else:
            labels, probs = payload
            out = self.build(tails[0], ranks[0])
            for label, prob in zip(reversed(labels[:-1]), reversed(probs)):
                out = ParseTree(label, span, (out,), None, prob)
        self.built[key] = out
        return out


def _exact_logp(tree):
    logs = []
    stack = [tree]
    while stack:
        node = stack.pop()
        kids = node.children
        if kids:
            logs.append(math.log(node.rule_prob))
            stack.extend(kids)
    return math.fsum(logs)


def _ranked(trees):
    """Sort by exact log-probability, ties by rule sequence."""
    scored = sorted(((-_exact_logp(t), i) for i, t in enumerate(trees)))
    out = []
    i = 0
    while i < len(scored):
        j = i
        while j < len(scored) and scored[j][0] == scored[i][0]:
            j += 1
        group = [trees[k] for _, k in scored[i:j]]
        if len(group) > 1:
            group.sort(key=lambda t: t.rule_sequence())
        out.extend(group)
        i = j
    return out


def _low_rules(comp, tau):
    if tau <= 0.0:
        return frozenset()
    return frozenset(rid for rid, p in enumerate(comp.probs) if p <= tau)


def cky_parse(tokens, g, cfg=None):
    """Parse ``tokens`` and return up to ``cfg.k_best`` debinarized trees.

    Trees are ordered by probability (non-increasing) with ties broken by
    their left-to-right rule sequences.  An empty list means the sentence has
    no surviving analysis.
    """
    cfg = cfg or ParserConfig()
    tokens = list(tokens)
    if not tokens:
        raise ParseError("cannot parse an empty token sequence")
    if len(tokens) > cfg.max_len:
        raise ParseError(f"sentence of {len(tokens)} tokens exceeds max_len={cfg.max_len}")
    if not g.binarized:
        raise ParseError("cky_parse needs a binarized grammar (see binarize_grammar)")
    comp = _compiled(g)
    chart = _Chart(tokens, comp, cfg.unknown_words)
    if chart.root is None:
        return []
    chart.score()
    if not chart.root.alive:
        return []
    low = _low_rules(comp, cfg.tau)
    if low:
        chart.common_low(low)
        banned = low - chart.root.low
        if banned:
            chart.ban(banned)
            if not chart.root.alive:
                return []
    root = chart.root
    k = cfg.k_best
    chart.kth(root, k - 1)
    n = len(root.D)
    if n == k:
        # pull in derivations tied with the k-th so the tie-break is exact
        floor = root.D[k - 1][0] - _TIE_EPS
        while True:
            chart.kth(root, n)
            if len(root.D) <= n or root.D[n][0] < floor:
                break
            n += 1
    trees = [chart.build(root, r) for r in range(n)]
    return _ranked(trees)[:k]


def tree_logprob(tree):
    """Log-probability of a parser output (fsum of its rule log-probabilities)."""
    return _exact_logp(tree)


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------


def _compositions(i, j, parts):
    """All ways to cut [i, j) into ``parts`` non-empty contiguous pieces."""
    if parts == 1:
        yield ((i, j),)
        return
    for k in range(i + 1, j - parts + 2):
        for rest in _compositions(k, j, parts - 1):
            yield ((i, k),) + rest


def brute_force_parse(tokens, g):
    """Enumerate every derivation top-down on the unbinarized grammar.

    Exponential; bounded to short sentences and small grammars.  Unary chains
    may not revisit a label on the same span, matching ``cky_parse``.
    Returns ``(tree, probability)`` pairs.
    """
    tokens = list(tokens)
    if g.binarized:
        g = g.unbinarized
    if len(tokens) > ORACLE_MAX_LEN or len(g) > ORACLE_MAX_RULES:
        raise OracleBoundError(
            f"oracle bound exceeded ({len(tokens)} tokens, {len(g)} rules; "
            f"limits {ORACLE_MAX_LEN}, {ORACLE_MAX_RULES})"
        )
    if not tokens:
        raise ParseError("cannot parse an empty token sequence")
    by_lhs = {}
    for r in g:
        by_lhs.setdefault(r.lhs, []).append((r, math.log(r.prob)))
    pre = g.preterminals
    no_chain = frozenset()
    memo = {}

    def derive(sym, i, j, chain):
        key = (sym, i, j, chain)
        if key in memo:
            return memo[key]
        out = []
        if sym in pre:
            if j - i == 1:
                for r, lp in by_lhs[sym]:
                    if tokens[i] == r.rhs[0]:
                        out.append((ParseTree(sym, (i, j), (leaf(tokens[i], i),), None, r.prob), lp))
            memo[key] = out
            return out
        for r, rlp in by_lhs.get(sym, ()):
            rhs = r.rhs
            if len(rhs) == 1:
                sub_chain = chain | {sym}
                if rhs[0] in sub_chain:
                    continue
                for t, lp in derive(rhs[0], i, j, sub_chain):
                    out.append((ParseTree(sym, (i, j), (t,), None, r.prob), lp + rlp))
                continue
            if j - i < len(rhs):
                continue
            for spans in _compositions(i, j, len(rhs)):
                options = []
                for c, (a, b) in zip(rhs, spans):
                    found = derive(c, a, b, no_chain)
                    if not found:
                        break
                    options.append(found)
                else:
                    for combo in itertools.product(*options):
                        kids = tuple(t for t, _ in combo)
                        lp = rlp + sum(x for _, x in combo)
                        out.append((ParseTree(sym, (i, j), kids, None, r.prob), lp))
        memo[key] = out
        return out

    results = derive(g.start, 0, len(tokens), no_chain)
    return [(t, math.exp(_exact_logp(t))) for t, _ in results]
