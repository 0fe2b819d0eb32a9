"""Grammar-based augmentation: subtree swapping and word substitution.

For one class at a time:

1. every sentence is parsed into all surviving trees (``cky_parse``) and each
   tree is lexicalized;
2. non-root constituents with a target label become swap donors
   (``subtree_pool``) and every (POS, word) leaf pair enters the word pool;
3. a new sample starts from a base tree, swaps up to ``max_swaps``
   non-overlapping constituents for same-label donors, then replaces words by
   synonyms or by other words of the same POS pool, and reads off the leaves.

Samples are deduplicated against the class's originals and against each
other.  Sample ``i`` draws all of its randomness from the stream
``derive_rng(seed, "augmenter", class_label, i)``.
"""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace

from .errors import AugmentError, BudgetError
from .grammar import binarize_grammar, with_lexical_rules
from .lexicalizer import DEFAULT_TARGETS, extract_subtrees, lexicalize, subtree_sites
from .lexicon import DEFAULT_POS_MAP, synonyms
from .parser import ParserConfig, cky_parse
from .rng import derive_rng

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentConfig:
    tau: float = 0.05
    k_best: int = 10
    max_len: int = 64
    target_labels: frozenset = DEFAULT_TARGETS
    min_span: int = 2
    max_swaps: int = 2
    p_syn: float = 0.5
    p_pool: float = 0.3
    budget: int = 200
    seed: int = 0
    max_retries: int = None
    match_head_pos: bool = False

    def __post_init__(self):
        object.__setattr__(self, "target_labels", frozenset(self.target_labels))
        for name in ("p_syn", "p_pool"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.max_swaps < 0:
            raise ValueError(f"max_swaps must be >= 0, got {self.max_swaps}")

    @property
    def retries(self):
        return 50 * self.budget if self.max_retries is None else self.max_retries

    def parser_config(self):
        return ParserConfig(tau=self.tau, k_best=self.k_best, max_len=self.max_len)

    def to_dict(self):
        d = asdict(self)
        d["target_labels"] = sorted(self.target_labels)
        return d

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


@dataclass
class ClassPools:
    class_label: str
    subtree_pool: dict = field(default_factory=dict)  # root label -> [Subtree]
    word_pool: dict = field(default_factory=dict)  # POS -> [word] (ordered set)
    tree_bank: list = field(default_factory=list)  # [(sentence_id, LexTree)]
    originals: set = field(default_factory=set)  # token tuples of the source sentences
    skipped: list = field(default_factory=list)  # ids of unparseable sentences
    head_rules: object = None

    def words(self):
        return {w for ws in self.word_pool.values() for w in ws}


@dataclass
class AugmentedSample:
    text: list
    class_label: str
    provenance: dict
    tree: object = field(default=None, repr=False, compare=False)

    def to_json(self):
        return {"text": " ".join(self.text), "label": self.class_label,
                "provenance": self.provenance}


def build_pools(class_label, sentences, g, h, cfg):
    """Parse, lexicalize and pool every sentence of one class."""
    sentences = list(sentences)
    if not sentences:
        raise AugmentError(f"no sentences for class {class_label!r}")
    if not g.binarized:
        g = binarize_grammar(g)
    pcfg = cfg.parser_config()
    pools = ClassPools(class_label, head_rules=h)
    for sid, tokens in sentences:
        tokens = list(tokens)
        pools.originals.add(tuple(tokens))
        trees = cky_parse(tokens, g, pcfg) if len(tokens) <= pcfg.max_len else []
        if not trees:
            pools.skipped.append(sid)
            continue
        for tree in trees:
            lt = lexicalize(tree, h)
            pools.tree_bank.append((sid, lt))
            for sub in extract_subtrees(lt, cfg.target_labels, cfg.min_span, class_label, sid):
                pools.subtree_pool.setdefault(sub.root_label, []).append(sub)
            for pre in lt.preterminals():
                bucket = pools.word_pool.setdefault(pre.label, [])
                if pre.head_word not in bucket:
                    bucket.append(pre.head_word)
    if pools.skipped:
        log.warning("class %s: %d of %d sentences unparseable, skipped",
                    class_label, len(pools.skipped), len(sentences))
    if not pools.tree_bank:
        raise AugmentError(f"empty pool for class {class_label!r}")
    return pools


def _overlaps(a, b):
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def _set_at(tree, path, new):
    if not path:
        return new
    i = path[0]
    kids = list(tree.children)
    kids[i] = _set_at(kids[i], path[1:], new)
    return replace(tree, children=tuple(kids))


def _donors(pools, node, base_id, cfg):
    donors = pools.subtree_pool.get(node.label, ())
    if cfg.match_head_pos:
        donors = [d for d in donors if d.head_pos == node.head_pos]
    foreign = [d for d in donors if d.source_sentence_id != base_id]
    return foreign or list(donors)


def swap_subtrees(base, pools, rng, cfg, base_id=None):
    """Swap up to ``cfg.max_swaps`` non-overlapping constituents of ``base``.

    Donors share the site's root label (and head POS with
    ``match_head_pos``) and come from another sentence whenever one is
    available.  Returns the new tree and one record per swap.
    """
    n = rng.randint(0, cfg.max_swaps) if cfg.max_swaps > 0 else 0
    if n == 0:
        return base, []
    sites = [(path, node, _donors(pools, node, base_id, cfg))
             for path, node in subtree_sites(base, cfg.target_labels, cfg.min_span)]
    sites = [s for s in sites if s[2]]
    if not sites:
        return base, []
    chosen = []
    for site in rng.sample(sites, len(sites)):
        if len(chosen) == n:
            break
        if not any(_overlaps(site[0], c[0]) for c in chosen):
            chosen.append(site)
    tree = base
    records = []
    for path, node, donors in chosen:
        donor = rng.choice(donors)
        tree = _set_at(tree, path, donor.tree)
        records.append({
            "site": list(path),
            "label": node.label,
            "removed": " ".join(node.words()),
            "inserted": " ".join(donor.words),
            "donor_sentence": donor.source_sentence_id,
        })
    tree = tree.reindex(0)
    if pools.head_rules is not None:
        tree = lexicalize(tree, pools.head_rules)
    return tree, records


def _replace_leaves(tree, new_words, pos=None):
    """Copy of ``tree`` whose i-th leaf word becomes ``new_words[i]`` when set."""
    if pos is None:
        pos = [0]
    if tree.is_leaf:
        i = pos[0]
        pos[0] += 1
        w = new_words.get(i)
        if w is None:
            return tree
        return replace(tree, label=w, word=w)
    kids = tuple(_replace_leaves(c, new_words, pos) for c in tree.children)
    return replace(tree, children=kids)


def substitute_words(t, pools, lex, m, rng, cfg):
    """Per pooled leaf: synonym with ``p_syn``, else other pool word with ``p_pool``."""
    m = DEFAULT_POS_MAP if m is None else m
    new_words = {}
    records = []
    for i, pre in enumerate(t.preterminals()):
        tag = pre.label
        word = pre.children[0].word
        pool = pools.word_pool.get(tag)
        if pool is None:
            continue
        if rng.random() < cfg.p_syn:
            syns = synonyms(lex, word, tag, m)
            if syns:
                new = rng.choice(syns)
                new_words[i] = new
                records.append({"position": i, "tag": tag, "old": word, "new": new,
                                "source": "synonym"})
                continue
        if rng.random() < cfg.p_pool:
            others = [w for w in pool if w != word]
            if others:
                new = rng.choice(others)
                new_words[i] = new
                records.append({"position": i, "tag": tag, "old": word, "new": new,
                                "source": "pool"})
    if not new_words:
        return t, records
    tree = _replace_leaves(t, new_words)
    if pools.head_rules is not None:
        tree = lexicalize(tree, pools.head_rules)
    return tree, records


def yield_sentence(t):
    return t.words()


def _one(pools, lex, m, cfg, index):
    sid, base = pools.tree_bank[index % len(pools.tree_bank)]
    rng = derive_rng(cfg.seed, "augmenter", pools.class_label, index)
    tree, swaps = swap_subtrees(base, pools, rng, cfg, base_id=sid)
    tree, subs = substitute_words(tree, pools, lex, m, rng, cfg)
    provenance = {
        "base_sentence_id": sid,
        "base_tree": index % len(pools.tree_bank),
        "seed_path": [cfg.seed, "augmenter", pools.class_label, index],
        "swaps": swaps,
        "substitutions": subs,
    }
    return AugmentedSample(list(yield_sentence(tree)), pools.class_label, provenance, tree)


def replay_sample(pools, lex, m, cfg, provenance):
    """Regenerate a sample from its provenance record."""
    return _one(pools, lex, m, cfg, provenance["seed_path"][-1])


def generate(pools, lex, m, cfg):
    """Produce exactly ``cfg.budget`` unique samples, round-robin over base trees."""
    if not pools.tree_bank:
        raise AugmentError(f"empty pool for class {pools.class_label!r}")
    seen = set(pools.originals)
    out = []
    duplicates = 0
    index = 0
    while len(out) < cfg.budget:
        sample = _one(pools, lex, m, cfg, index)
        index += 1
        key = tuple(sample.text)
        if key in seen:
            duplicates += 1
            if duplicates > cfg.retries:
                raise BudgetError(
                    f"class {pools.class_label!r}: only {len(out)} unique samples reachable "
                    f"(budget {cfg.budget}, {duplicates} duplicate draws)",
                    achieved=len(out), budget=cfg.budget,
                )
            continue
        seen.add(key)
        out.append(sample)
    return out


def grammatical(sample, g, pools):
    """Whether ``sample`` parses (tau=0) under ``g`` extended with pooled and substituted words.

    Unknown-word backoff is disabled so every token must be licensed by a
    lexical rule.
    """
    pairs = [(tag, w) for tag, ws in pools.word_pool.items() for w in ws]
    pairs += [(s["tag"], s["new"]) for s in sample.provenance.get("substitutions", ())]
    ext = with_lexical_rules(g, pairs)
    if not ext.binarized:
        ext = binarize_grammar(ext)
    cfg = ParserConfig(tau=0.0, k_best=1, max_len=max(64, len(sample.text)), unknown_words=False)
    return bool(cky_parse(sample.text, ext, cfg))


class ALPAugmenter:
    """Callable handle used by the splitter: ``aug(label, records, budget, seed)``.

    ``records`` are ``(id, tokens)`` pairs of one class.
    """

    def __init__(self, grammar, head_rules, lexicon=None, pos_map=None, config=None):
        self.grammar = grammar if grammar.binarized else binarize_grammar(grammar)
        self.head_rules = head_rules
        self.lexicon = lexicon
        self.pos_map = DEFAULT_POS_MAP if pos_map is None else pos_map
        self.config = config or AugmentConfig()

    def __call__(self, class_label, records, budget, seed):
        cfg = replace(self.config, budget=budget, seed=seed)
        pools = build_pools(class_label, records, self.grammar, self.head_rules, cfg)
        return generate(pools, self.lexicon, self.pos_map, cfg)

    def digest(self):
        return self.config.digest()


# ---------------------------------------------------------------------------
# EDA baseline
# ---------------------------------------------------------------------------

EDA_OPS = ("synonym", "insert", "swap", "delete")


def eda_augment(tokens, alpha=0.1, n_ops=None, rng=None, lexicon=None, ops=EDA_OPS):
    """Easy Data Augmentation: synonym replacement, random insertion, random
    swap and random deletion, each applied at rate ``alpha``.

    Replacement, insertion and swap make ``n_ops`` edits each (default
    ``max(1, int(alpha * len(tokens)))``); deletion drops each token with
    probability ``alpha`` but never the last one.  ``alpha == 0`` is the
    identity.  Synonyms come from ``lexicon`` regardless of POS.
    """
    tokens = list(tokens)
    if not tokens:
        raise AugmentError("cannot augment an empty sentence")
    if alpha <= 0:
        return tokens
    if rng is None:
        rng = derive_rng(0, "eda")
    n = n_ops if n_ops is not None else max(1, int(alpha * len(tokens)))

    def syns(word):
        return lexicon.any_pos(word) if lexicon is not None else []

    for op in ops:
        if op == "synonym":
            positions = [i for i, w in enumerate(tokens) if syns(w)]
            for i in rng.sample(positions, min(n, len(positions))):
                tokens[i] = rng.choice(syns(tokens[i]))
        elif op == "insert":
            for _ in range(n):
                candidates = [w for w in tokens if syns(w)]
                if not candidates:
                    break
                word = rng.choice(syns(rng.choice(candidates)))
                tokens.insert(rng.randint(0, len(tokens)), word)
        elif op == "swap":
            if len(tokens) < 2:
                continue
            for _ in range(n):
                i, j = rng.sample(range(len(tokens)), 2)
                tokens[i], tokens[j] = tokens[j], tokens[i]
        elif op == "delete":
            kept = [w for w in tokens if rng.random() >= alpha]
            tokens = kept or [rng.choice(tokens)]
        else:
            raise ValueError(f"unknown EDA operation {op!r}")
    return tokens
