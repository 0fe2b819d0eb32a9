"""Probabilistic context-free grammars and their parse trees.

Trees use plain string labels.  A node is a *leaf* (terminal) when it has no
children, a *preterminal* when its only child is a leaf, and a nonterminal
otherwise.  Grammars follow the same convention: a symbol that never occurs
as a left-hand side is a terminal.
"""
import enum
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

from .errors import GrammarError, TreebankError

MARKER = "@"

ARROW = "->"


class SymbolKind(enum.Enum):
    NONTERMINAL = "nonterminal"
    PRETERMINAL = "preterminal"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise GrammarError(f"invalid symbol name {self.name!r}")


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple
    prob: float

    def __post_init__(self):
        if not isinstance(self.rhs, tuple):
            object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.rhs:
            raise GrammarError(f"rule for {self.lhs} has an empty right-hand side")
        if not 0.0 < self.prob <= 1.0:
            raise GrammarError(f"rule {self.name} has probability {self.prob} outside (0, 1]")

    @property
    def key(self):
        return (self.lhs, self.rhs)

    @property
    def name(self):
        return f"{self.lhs} {ARROW} {' '.join(self.rhs)}"

    def __str__(self):
        return f"{self.prob:.12g} {self.name}"


@dataclass(frozen=True)
class ParseTree:
    """A derivation tree over the half-open token span ``[span[0], span[1])``.

    ``rule_prob`` is the probability of the production applied at this node
    (1.0 on leaves and on trees read from a treebank).
    """

    label: str
    span: tuple
    children: tuple = ()
    word: str = None
    rule_prob: float = 1.0

    @property
    def is_leaf(self):
        return not self.children

    @property
    def is_preterminal(self):
        return len(self.children) == 1 and self.children[0].is_leaf

    @property
    def production(self):
        """``(lhs, rhs)`` of the rule applied here, ``None`` on leaves."""
        if self.is_leaf:
            return None
        return (self.label, tuple(c.label for c in self.children))

    def nodes(self):
        """Preorder iteration over all nodes."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self):
        return [n for n in self.nodes() if n.is_leaf]

    def words(self):
        return [n.word for n in self.leaves()]

    def preterminals(self):
        return [n for n in self.nodes() if n.is_preterminal]

    def productions(self):
        """Preorder list of ``(lhs, rhs)`` pairs of the internal nodes."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            kids = node.children
            if kids:
                out.append((node.label, tuple(c.label for c in kids)))
                stack.extend(reversed(kids))
        return out

    def rule_sequence(self):
        """Left-to-right (preorder) rule names; used as a deterministic tie-break."""
        return tuple(f"{lhs} {ARROW} {' '.join(rhs)}" for lhs, rhs in self.productions())

    def log_prob(self):
        return math.fsum(math.log(n.rule_prob) for n in self.nodes() if not n.is_leaf)

    def to_bracket(self):
        if self.is_leaf:
            return self.word
        return f"({self.label} {' '.join(c.to_bracket() for c in self.children)})"

    def __str__(self):
        return self.to_bracket()

    def reindex(self, start=0):
        """Copy of the tree with spans recomputed from ``start``."""
        if self.is_leaf:
            return replace(self, span=(start, start + 1))
        children = []
        pos = start
        for child in self.children:
            child = child.reindex(pos)
            pos = child.span[1]
            children.append(child)
        return replace(self, span=(start, pos), children=tuple(children))


def leaf(word, i):
    return ParseTree(word, (i, i + 1), (), word, 1.0)


# ---------------------------------------------------------------------------
# Treebank reading
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokens_with_lines(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        for m in _TOKEN.finditer(line):
            yield m.group(), lineno


def _build(node, start, lineno):
    """Turn a nested ``[label, child...]`` list into a ParseTree."""
    label, kids = node[0], node[1:]
    if label is None:
        # PTB-style unlabeled wrapper: ( (S ...) )
        if len(kids) == 1 and isinstance(kids[0], list):
            return _build(kids[0], start, lineno)
        raise TreebankError(f"node without label at line {lineno}")
    if not kids:
        raise TreebankError(f"empty constituent ({label}) at line {lineno}")
    if all(isinstance(k, str) for k in kids):
        if len(kids) != 1:
            raise TreebankError(
                f"preterminal {label} must dominate exactly one word at line {lineno}"
            )
        return ParseTree(label, (start, start + 1), (leaf(kids[0], start),))
    if any(isinstance(k, str) for k in kids):
        raise TreebankError(f"words mixed with constituents under {label} at line {lineno}")
    children = []
    pos = start
    for kid in kids:
        child = _build(kid, pos, lineno)
        children.append(child)
        pos = child.span[1]
    return ParseTree(label, (start, pos), tuple(children))


def parse_trees(text):
    """Parse every bracketed tree in ``text``.  Trees may span several lines."""
    trees = []
    stack = []
    start_line = None
    expect_label = False
    lineno = 0
    for tok, lineno in _tokens_with_lines(text):
        if tok == "(":
            if not stack:
                start_line = lineno
            node = [None]
            if stack:
                stack[-1].append(node)
            stack.append(node)
            expect_label = True
        elif tok == ")":
            if not stack:
                raise TreebankError(f"unbalanced brackets at line {lineno}")
            node = stack.pop()
            expect_label = False
            if not stack:
                trees.append(_build(node, 0, start_line))
        else:
            if not stack:
                raise TreebankError(f"token {tok!r} outside brackets at line {lineno}")
            if expect_label:
                stack[-1][0] = tok
            else:
                stack[-1].append(tok)
            expect_label = False
    if stack:
        raise TreebankError(f"unbalanced brackets at line {start_line}")
    return trees


def parse_tree(text):
    trees = parse_trees(text)
    if len(trees) != 1:
        raise TreebankError(f"expected one tree, found {len(trees)}")
    return trees[0]


def load_treebank(path):
    text = Path(path).read_text(encoding="utf-8")
    trees = parse_trees(text)
    if not trees:
        raise TreebankError(f"empty treebank: {path}")
    return trees


# ---------------------------------------------------------------------------
# Grammar
# ---------------------------------------------------------------------------


def _is_lexical(r, lhs):
    # "X -> X" can only be lexical: punctuation tags such as (. .) reuse the word
    return len(r.rhs) == 1 and (r.rhs[0] not in lhs or r.rhs[0] == r.lhs)


class Grammar:
    """A PCFG: rules with per-LHS normalized probabilities.

    Treat instances as immutable; derived indexes are cached on first use.
    A binarized grammar keeps a reference to the grammar it was derived from
    in ``unbinarized`` and maps each first binary step back to its source rule
    in ``origin``.
    """

    def __init__(self, rules, start="S", binarized=False, unbinarized=None, origin=None, tol=1e-9):
        self.start = start
        self.binarized = binarized
        self.unbinarized = unbinarized
        self.origin = dict(origin or {})
        self._rules = {}
        for r in rules:
            if r.key in self._rules:
                raise GrammarError(f"duplicate rule {r.name}")
            self._rules[r.key] = r
        self._validate(tol)

    def _validate(self, tol):
        if not self._rules:
            raise GrammarError("grammar has no rules")
        lhs = {r.lhs for r in self._rules.values()}
        if self.start not in lhs:
            raise GrammarError(f"start symbol {self.start} has no rules")
        for r in self._rules.values():
            Symbol(r.lhs, SymbolKind.NONTERMINAL)
            terminals = [s for s in r.rhs if s not in lhs]
            if terminals and len(r.rhs) != 1:
                raise GrammarError(
                    f"rule {r.name} mixes terminals into a multi-symbol right-hand side"
                )
        lexical_lhs = {r.lhs for r in self._rules.values() if _is_lexical(r, lhs)}
        for r in self._rules.values():
            if r.lhs in lexical_lhs and not _is_lexical(r, lhs):
                raise GrammarError(f"preterminal {r.lhs} also rewrites to {r.rhs[0]}")
        for sym, mass in self.lhs_mass().items():
            if abs(mass - 1.0) > tol:
                raise GrammarError(f"LHS {sym} mass {mass:.12g}")

    @property
    def rules(self):
        return tuple(self._rules.values())

    def __len__(self):
        return len(self._rules)

    def __iter__(self):
        return iter(self._rules.values())

    def __contains__(self, key):
        return key in self._rules

    def get(self, lhs, rhs):
        return self._rules.get((lhs, tuple(rhs)))

    def prob(self, lhs, rhs):
        r = self.get(lhs, rhs)
        return 0.0 if r is None else r.prob

    def lhs_mass(self):
        mass = defaultdict(list)
        for r in self._rules.values():
            mass[r.lhs].append(r.prob)
        return {k: math.fsum(v) for k, v in mass.items()}

    @cached_property
    def nonterminals(self):
        return frozenset(r.lhs for r in self._rules.values()) - self.preterminals

    @cached_property
    def preterminals(self):
        lhs = {r.lhs for r in self._rules.values()}
        return frozenset(r.lhs for r in self._rules.values() if _is_lexical(r, lhs))

    @cached_property
    def terminals(self):
        lhs = {r.lhs for r in self._rules.values()}
        return frozenset(r.rhs[0] for r in self._rules.values() if _is_lexical(r, lhs))

    def kind(self, name):
        if name in self.preterminals:
            return SymbolKind.PRETERMINAL
        if name in self.nonterminals:
            return SymbolKind.NONTERMINAL
        return SymbolKind.TERMINAL

    @cached_property
    def lexicon(self):
        """word -> list of (preterminal, prob)."""
        index = defaultdict(list)
        for r in self._rules.values():
            if r.lhs in self.preterminals:
                index[r.rhs[0]].append((r.lhs, r.prob))
        return dict(index)

    def source_rule(self, lhs, rhs):
        """The rule of the unbinarized grammar that a binarized rule stems from.

        Intermediate (marker) rules map to ``None``.
        """
        key = (lhs, tuple(rhs))
        if key in self.origin:
            return self.origin[key]
        if lhs.startswith(MARKER):
            return None
        return key

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (
            self.start == other.start
            and self.binarized == other.binarized
            and self._rules == other._rules
        )

    def isclose(self, other, rel_tol=1e-11):
        """Same rules and start symbol, probabilities equal up to ``rel_tol``."""
        if self.start != other.start or self._rules.keys() != other._rules.keys():
            return False
        return all(
            math.isclose(r.prob, other._rules[k].prob, rel_tol=rel_tol)
            for k, r in self._rules.items()
        )

    def __repr__(self):
        return f"Grammar({len(self)} rules, start={self.start!r}, binarized={self.binarized})"


def induce_grammar(treebank, start="S"):
    """Maximum-likelihood grammar: q(A -> b) = count(A -> b) / count(A)."""
    treebank = list(treebank)
    if not treebank:
        raise GrammarError("cannot induce a grammar from zero trees")
    counts = Counter()
    for i, tree in enumerate(treebank):
        if tree.label != start:
            raise GrammarError(f"tree {i} has root {tree.label}, expected {start}")
        for lhs, rhs in tree.productions():
            counts[(lhs, rhs)] += 1
    lhs_totals = Counter()
    for (lhs, _), c in counts.items():
        lhs_totals[lhs] += c
    rules = [Rule(lhs, rhs, c / lhs_totals[lhs]) for (lhs, rhs), c in counts.items()]
    return Grammar(rules, start=start)


def _marker_name(lhs, suffix):
    return f"{MARKER}{lhs}|{'.'.join(suffix)}"


def binarize_grammar(g):
    """Right-factor every rule with more than two children.

    ``NP -> DT JJ NN (0.4)`` becomes ``NP -> DT @NP|JJ.NN (0.4)`` and
    ``@NP|JJ.NN -> JJ NN (1.0)``.  Intermediate symbols are named after the
    full remaining suffix, so no two source rules are merged incorrectly and
    tree probabilities survive debinarization unchanged.
    """
    if g.binarized:
        raise GrammarError("grammar is already binarized")
    for r in g:
        for sym in (r.lhs, *r.rhs):
            if sym.startswith(MARKER):
                raise GrammarError(f"symbol {sym} uses the reserved prefix {MARKER!r}")
    new_rules = {}
    origin = {}
    suffix_of = {}
    for r in g:
        if len(r.rhs) <= 2:
            new_rules[r.key] = r
            continue
        first = (r.rhs[0], _marker_name(r.lhs, r.rhs[1:]))
        new_rules[(r.lhs, first)] = Rule(r.lhs, first, r.prob)
        origin[(r.lhs, first)] = r.key
        rest = r.rhs[1:]
        while rest:
            name = _marker_name(r.lhs, rest)
            if suffix_of.setdefault(name, rest) != rest:
                raise GrammarError(f"intermediate symbol {name} is ambiguous")
            rhs = rest if len(rest) == 2 else (rest[0], _marker_name(r.lhs, rest[1:]))
            new_rules[(name, rhs)] = Rule(name, rhs, 1.0)
            rest = rest[1:] if len(rest) > 2 else ()
    return Grammar(
        new_rules.values(), start=g.start, binarized=True, unbinarized=g, origin=origin
    )


def debinarize_tree(t):
    """Splice out marker nodes; spans and the product of rule_probs are kept."""
    if t.is_leaf:
        return t
    children = []
    prob = t.rule_prob
    for child in t.children:
        child = debinarize_tree(child)
        if child.label.startswith(MARKER):
            children.extend(child.children)
            prob *= child.rule_prob
        else:
            children.append(child)
    return replace(t, children=tuple(children), rule_prob=prob)


def tree_probability(t, g):
    """Product of the rule probabilities of ``t`` under ``g`` (summed in log space)."""
    logp = []
    for lhs, rhs in t.productions():
        r = g.get(lhs, rhs)
        if r is None and g.unbinarized is not None:
            r = g.unbinarized.get(lhs, rhs)
        if r is None:
            raise GrammarError(f"unknown production {lhs} → {' '.join(rhs)}")
        logp.append(math.log(r.prob))
    return math.exp(math.fsum(logp))


def with_lexical_rules(g, pairs):
    """Return ``g`` extended with lexical rules ``tag -> word`` for new pairs.

    Each preterminal receiving ``m`` new words on top of ``n`` existing ones
    is rescaled by ``n / (n + m)`` and each new word gets ``1 / (n + m)``.
    Binarized grammars are extended at the source level and re-binarized.
    """
    base = g.unbinarized if g.binarized else g
    new = defaultdict(set)
    for tag, word in pairs:
        if tag in base.preterminals and base.get(tag, (word,)) is None:
            new[tag].add(word)
    if not new:
        return g
    counts = Counter(r.lhs for r in base if r.lhs in new)
    rules = []
    for r in base:
        if r.lhs in new:
            n = counts[r.lhs]
            rules.append(Rule(r.lhs, r.rhs, r.prob * n / (n + len(new[r.lhs]))))
        else:
            rules.append(r)
    for tag in sorted(new):
        total = counts[tag] + len(new[tag])
        rules.extend(Rule(tag, (w,), 1.0 / total) for w in sorted(new[tag]))
    extended = Grammar(rules, start=base.start)
    return binarize_grammar(extended) if g.binarized else extended


# ---------------------------------------------------------------------------
# Grammar files
# ---------------------------------------------------------------------------


def format_grammar(g):
    if g.binarized:
        raise GrammarError("save the unbinarized grammar; binarization is redone on load")
    lines = [f"# start {g.start}"]
    for r in sorted(g, key=lambda r: (r.lhs != g.start, r.lhs, r.rhs)):
        lines.append(str(r))
    return "\n".join(lines) + "\n"


def save_grammar(g, path):
    Path(path).write_text(format_grammar(g), encoding="utf-8")


def parse_rule_line(line):
    """``0.5 NP -> DT NN`` -> Rule("NP", ("DT", "NN"), 0.5)."""
    parts = line.split()
    if len(parts) < 4 or parts[2] != ARROW:
        raise GrammarError(f"malformed rule line {line!r}")
    try:
        prob = float(parts[0])
    except ValueError:
        raise GrammarError(f"bad probability in {line!r}") from None
    return Rule(parts[1], tuple(parts[3:]), prob)


def load_grammar(path, start=None):
    """Read a grammar file; the start symbol comes from a ``# start X`` header,
    then ``start``, then the first rule's left-hand side."""
    rules = []
    header_start = None
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*start\s+(\S+)$", line)
            if m:
                header_start = m.group(1)
            continue
        try:
            rules.append(parse_rule_line(line))
        except GrammarError as e:
            raise GrammarError(f"{e} (line {lineno})") from None
    if not rules:
        raise GrammarError(f"no rules in {path}")
    start = header_start or start or rules[0].lhs
    return Grammar(rules, start=start, tol=1e-6)
