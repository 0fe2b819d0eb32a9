"""POS-aware synonym lookup backed by a WordNet-style TSV export.

File format, one entry per line::

    <lemma>\\t<pos_class>\\t<syn1>,<syn2>,...

``pos_class`` is one of ``noun``, ``verb``, ``adj``, ``adv``.  Repeated
``(lemma, pos_class)`` lines (one per sense) are merged in file order.
"""
from pathlib import Path

from .errors import LexiconError

POS_CLASSES = ("noun", "verb", "adj", "adv")

DEFAULT_POS_MAP = {
    "NN": "noun", "NNS": "noun", "NNP": "noun", "NNPS": "noun",
    "VB": "verb", "VBD": "verb", "VBG": "verb", "VBN": "verb", "VBP": "verb", "VBZ": "verb",
    "JJ": "adj", "JJR": "adj", "JJS": "adj",
    "RB": "adv", "RBR": "adv", "RBS": "adv",
}


class SynonymLexicon:
    def __init__(self, entries=None):
        # (lemma, pos_class) -> list of synonyms, deduplicated, file order
        self.entries = {}
        for (lemma, pos), syns in (entries or {}).items():
            self.add(lemma, pos, syns)

    def add(self, lemma, pos_class, synonyms):
        if pos_class not in POS_CLASSES:
            raise LexiconError(f"unknown pos_class {pos_class!r}")
        lemma = lemma.lower()
        bucket = self.entries.setdefault((lemma, pos_class), [])
        for syn in synonyms:
            syn = syn.strip()
            if syn and syn.lower() != lemma and syn not in bucket:
                bucket.append(syn)

    def lookup(self, lemma, pos_class):
        return list(self.entries.get((lemma.lower(), pos_class), ()))

    def any_pos(self, lemma):
        """Synonyms of ``lemma`` across all POS classes (for POS-blind baselines)."""
        out = []
        for pos in POS_CLASSES:
            for syn in self.entries.get((lemma.lower(), pos), ()):
                if syn not in out:
                    out.append(syn)
        return out

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, SynonymLexicon) and self.entries == other.entries


def parse_lexicon(text):
    lex = SynonymLexicon()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 3:
            raise LexiconError(f"expected 3 tab-separated fields on line {lineno}")
        lemma, pos, syns = parts
        if pos not in POS_CLASSES:
            raise LexiconError(f"unknown pos_class '{pos}' line {lineno}")
        lex.add(lemma.strip(), pos, syns.split(","))
    return lex


def load_lexicon(path):
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def synonyms(lex, word, tag, pos_map=None):
    """Synonyms of ``word`` used as ``tag``; empty when the tag has no class."""
    pos_map = DEFAULT_POS_MAP if pos_map is None else pos_map
    pos = pos_map.get(tag)
    if pos is None or lex is None:
        return []
    return [s for s in lex.lookup(word, pos) if s.lower() != word.lower()]
