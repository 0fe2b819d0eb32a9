"""Head percolation and extraction of head-annotated constituents."""
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import HeadRuleError
from .grammar import ParseTree

LEFT_TO_RIGHT = "left-to-right"
RIGHT_TO_LEFT = "right-to-left"

_DIRECTIONS = {
    "left-to-right": LEFT_TO_RIGHT,
    "left": LEFT_TO_RIGHT,
    "right-to-left": RIGHT_TO_LEFT,
    "right": RIGHT_TO_LEFT,
}

DEFAULT_TARGETS = frozenset({"NP", "VP", "PP", "ADJP", "ADVP"})


@dataclass(frozen=True)
class HeadRuleTable:
    """parent label -> (direction, priority labels), plus a fallback side."""

    entries: dict = field(default_factory=dict)
    fallback: str = "rightmost"

    def __post_init__(self):
        if self.fallback not in ("leftmost", "rightmost"):
            raise HeadRuleError(f"fallback must be leftmost or rightmost, got {self.fallback!r}")
        for parent, (direction, priorities) in self.entries.items():
            if direction not in (LEFT_TO_RIGHT, RIGHT_TO_LEFT):
                raise HeadRuleError(f"bad direction {direction!r} for {parent}")
            if not priorities:
                raise HeadRuleError(f"empty priority list for {parent}")

    def head_index(self, parent, child_labels):
        """Index of the head child among ``child_labels``."""
        entry = self.entries.get(parent)
        if entry is not None:
            direction, priorities = entry
            order = range(len(child_labels))
            if direction == RIGHT_TO_LEFT:
                order = reversed(order)
            order = list(order)
            for wanted in priorities:
                for i in order:
                    if child_labels[i] == wanted:
                        return i
        return len(child_labels) - 1 if self.fallback == "rightmost" else 0


def parse_head_rules(text, fallback="rightmost"):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise HeadRuleError(f"head rule needs a parent, a direction and labels (line {lineno})")
        parent, direction, *priorities = parts
        if parent in entries:
            raise HeadRuleError(f"duplicate head rule {parent}")
        try:
            direction = _DIRECTIONS[direction]
        except KeyError:
            raise HeadRuleError(f"unknown direction {direction!r} (line {lineno})") from None
        entries[parent] = (direction, tuple(priorities))
    return HeadRuleTable(entries, fallback)


def load_head_rules(path, fallback="rightmost"):
    return parse_head_rules(Path(path).read_text(encoding="utf-8"), fallback)


def default_head_rules():
    text = resources.files("alp").joinpath("data/head_rules.txt").read_text(encoding="utf-8")
    return parse_head_rules(text)


@dataclass(frozen=True)
class LexTree(ParseTree):
    """A ParseTree whose nodes carry their lexical head word and its POS tag."""

    head_word: str = None
    head_pos: str = None


def lexicalize(t, h):
    """Annotate every node of ``t`` with its head, bottom-up.

    >>> from alp.grammar import parse_tree
    >>> rules = parse_head_rules("S left-to-right VP\\nNP left-to-right NN\\nVP left-to-right VB")
    >>> lt = lexicalize(parse_tree("(S (NP (NN movie)) (VP (VB bored)))"), rules)
    >>> lt.head_word, [c.head_word for c in lt.children]
    ('bored', ['movie', 'bored'])
    """
    if t.is_leaf:
        return LexTree(t.label, t.span, (), t.word, t.rule_prob, t.word, None)
    if t.is_preterminal:
        w = t.children[0]
        kid = LexTree(w.label, w.span, (), w.word, w.rule_prob, w.word, t.label)
        return LexTree(t.label, t.span, (kid,), None, t.rule_prob, w.word, t.label)
    kids = tuple(lexicalize(c, h) for c in t.children)
    head = kids[h.head_index(t.label, [k.label for k in kids])]
    return LexTree(t.label, t.span, kids, None, t.rule_prob, head.head_word, head.head_pos)


@dataclass(frozen=True)
class Subtree:
    tree: LexTree
    root_label: str
    head_word: str
    head_pos: str
    source_class: str = None
    source_sentence_id: str = None

    @property
    def words(self):
        return self.tree.words()


def subtree_sites(t, target_labels=DEFAULT_TARGETS, min_span=2):
    """``(path, node)`` for every non-root node eligible for extraction, preorder.

    ``path`` is the tuple of child indices leading from the root to the node.
    """
    out = []
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        if path and node.label in target_labels and node.span[1] - node.span[0] >= min_span:
            out.append((path, node))
        for i in reversed(range(len(node.children))):
            child = node.children[i]
            if not child.is_leaf:
                stack.append((path + (i,), child))
    return out


def extract_subtrees(t, target_labels=DEFAULT_TARGETS, min_span=2,
                     source_class=None, source_sentence_id=None):
    if min_span < 1:
        raise ValueError("min_span must be >= 1")
    return [
        Subtree(node, node.label, node.head_word, node.head_pos, source_class, source_sentence_id)
        for _, node in subtree_sites(t, target_labels, min_span)
    ]
