"""Labeled datasets, k-shot sampling and train/val splitting strategies.

With a labeled source of ``2k`` records per class and an augmentation budget
of ``N`` samples per class, the strategies assign per class:

=====================  ==============================  =====================
strategy               train                           val
=====================  ==============================  =====================
train-val              first k                         second k
augtrain-val           aug(first k, N)                 second k
train-train            all 2k                          all 2k
augment-and-split(r)   floor(r N) of shuffled aug(2k)  the other N - floor(r N)
augtrain-train         aug(all 2k, N)                  all 2k
augtrain-augtrain      aug(all 2k, N)                  the same N samples
=====================  ==============================  =====================

Augmented splits hold augmented samples only; originals are never mixed in.
"""
import enum
import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import BudgetError, DatasetError, SplitError
from .rng import derive_rng

# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Record:
    id: str
    text: str
    label: str
    provenance: dict = field(default=None, hash=False)

    def to_json(self):
        d = {"id": self.id, "text": self.text, "label": self.label}
        if self.provenance is not None:
            d["provenance"] = self.provenance
        return d


class LabeledDataset:
    def __init__(self, records):
        self.records = tuple(records)
        seen = set()
        for i, r in enumerate(self.records):
            if r.id in seen:
                raise DatasetError(f"duplicate record id {r.id!r}")
            seen.add(r.id)
            if not r.text or not r.text.strip():
                raise DatasetError(f"record {i} ({r.id}) has empty text")
            if r.label is None or r.label == "":
                raise DatasetError(f"record {i} ({r.id}) has no label")

    @property
    def classes(self):
        return sorted({r.label for r in self.records})

    def by_class(self):
        out = {c: [] for c in self.classes}
        for r in self.records:
            out[r.label].append(r)
        return out

    def counts(self):
        return dict(sorted(Counter(r.label for r in self.records).items()))

    def ids(self):
        return [r.id for r in self.records]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other):
        return isinstance(other, LabeledDataset) and self.records == other.records

    def __repr__(self):
        return f"LabeledDataset({len(self)} records, classes={self.classes})"

    def to_jsonl(self):
        return "".join(
            json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for r in self.records
        )


def _record_from_json(obj, index):
    if not isinstance(obj, dict):
        raise DatasetError(f"record {index} is not a JSON object")
    if "label" not in obj:
        raise DatasetError(f"record {index}: missing label field")
    if "text" not in obj:
        raise DatasetError(f"record {index}: missing text field")
    text = obj["text"]
    if not isinstance(text, str) or not text.strip():
        raise DatasetError(f"record {index}: empty text")
    return Record(str(obj.get("id", index)), text, str(obj["label"]), obj.get("provenance"))


def read_dataset(path, format=None):
    """Read a JSONL (``{"text", "label"[, "id"]}``) or TSV (``label<TAB>text``,
    or ``id<TAB>label<TAB>text``) dataset.  Missing ids default to the record index."""
    path = Path(path)
    if format is None:
        format = "tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl"
    records = []
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
    for index, line in enumerate(lines):
        if format == "jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"record {index}: invalid JSON ({e})") from None
            records.append(_record_from_json(obj, index))
        elif format == "tsv":
            parts = line.split("\t")
            if len(parts) == 2:
                rid, (label, text) = str(index), parts
            elif len(parts) == 3:
                rid, label, text = parts
            else:
                raise DatasetError(f"record {index}: missing label field")
            if not text.strip():
                raise DatasetError(f"record {index}: empty text")
            records.append(Record(rid, text, label))
        else:
            raise DatasetError(f"unknown dataset format {format!r}")
    return LabeledDataset(records)


_TOKEN = re.compile(r"\w+(?:['’]\w+)*|[^\w\s]")


def tokenize(text):
    """Whitespace/punctuation tokenizer; keeps intra-word apostrophes.

    >>> tokenize("The characters didn't seem.")
    ['The', 'characters', "didn't", 'seem', '.']
    """
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise DatasetError(f"no tokens in {text!r}")
    return tokens


def sample_k_shot(d, k, seed):
    """Per class draw 2k records: the first k train, the next k validate."""
    if k < 1:
        raise SplitError(f"k must be >= 1, got {k}")
    train, val, taken = [], [], set()
    for label, records in d.by_class().items():
        if len(records) < 2 * k:
            raise SplitError(f"class {label!r} has {len(records)} records, needs {2 * k}")
        chosen = derive_rng(seed, "splitter", "k-shot", label).sample(records, 2 * k)
        train.extend(chosen[:k])
        val.extend(chosen[k:])
        taken.update(r.id for r in chosen)
    rest = [r for r in d if r.id not in taken]
    return LabeledDataset(train), LabeledDataset(val), LabeledDataset(rest)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class SplitKind(enum.Enum):
    TRAIN_VAL = "train-val"
    AUGTRAIN_VAL = "augtrain-val"
    TRAIN_TRAIN = "train-train"
    AUGMENT_AND_SPLIT = "augment-and-split"
    AUGTRAIN_TRAIN = "augtrain-train"
    AUGTRAIN_AUGTRAIN = "augtrain-augtrain"

    @property
    def augments(self):
        return self not in (SplitKind.TRAIN_VAL, SplitKind.TRAIN_TRAIN)


STRATEGY_NAMES = [k.value for k in SplitKind]


@dataclass(frozen=True)
class SplitStrategy:
    kind: SplitKind
    ratio: float = None

    def __post_init__(self):
        kind = SplitKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SplitKind.AUGMENT_AND_SPLIT:
            if self.ratio is None:
                object.__setattr__(self, "ratio", 0.8)
            if not 0.0 < self.ratio < 1.0:
                raise SplitError(f"ratio must lie in (0, 1), got {self.ratio}")
        elif self.ratio is not None:
            raise SplitError(f"ratio only applies to augment-and-split, not {kind.value}")

    @classmethod
    def parse(cls, name, ratio=None):
        try:
            kind = SplitKind(name)
        except ValueError:
            raise SplitError(
                f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)}"
            ) from None
        return cls(kind, ratio if kind is SplitKind.AUGMENT_AND_SPLIT else None)

    @property
    def name(self):
        return self.kind.value


@dataclass
class SplitResult:
    train: LabeledDataset
    val: LabeledDataset
    manifest: dict


def _sha256(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _train_size(ratio, budget):
    return math.floor(Fraction(str(ratio)) * budget)


def _augmented(augmenter, label, records, budget, seed, strategy):
    pairs = [(r.id, tokenize(r.text)) for r in records]
    try:
        samples = augmenter(label, pairs, budget, seed)
    except BudgetError as e:
        raise SplitError(f"{strategy.name}: {e}") from e
    if len(samples) != budget:
        raise SplitError(f"{strategy.name}: augmenter returned {len(samples)} samples, "
                         f"expected {budget} for class {label!r}")
    out = []
    for i, s in enumerate(samples):
        text = " ".join(s.text) if hasattr(s, "text") and not isinstance(s, str) else str(s)
        prov = getattr(s, "provenance", None)
        out.append(Record(f"aug-{label}-{i:05d}", text, label, prov))
    return out


def make_split(source, strategy, k, budget=None, augmenter=None, seed=0):
    """Apply ``strategy`` to a source holding exactly ``2k`` records per class.

    ``augmenter(label, [(id, tokens)], budget, seed)`` must return ``budget``
    samples (objects with ``.text`` token lists, or strings).
    """
    if isinstance(strategy, str):
        strategy = SplitStrategy.parse(strategy)
    kind = strategy.kind
    if k < 1:
        raise SplitError(f"k must be >= 1, got {k}")
    if kind.augments:
        if budget is None or budget < 1:
            raise SplitError(f"{strategy.name} needs an augmentation budget >= 1")
        if augmenter is None:
            raise SplitError(f"{strategy.name} needs an augmenter")
    train, val = [], []
    counts = {}
    for label, records in source.by_class().items():
        if len(records) != 2 * k:
            raise SplitError(f"class {label!r} has {len(records)} source records, expected {2 * k}")
        first, second = records[:k], records[k:]
        if kind is SplitKind.TRAIN_VAL:
            tr, va = first, second
        elif kind is SplitKind.AUGTRAIN_VAL:
            tr, va = _augmented(augmenter, label, first, budget, seed, strategy), second
        elif kind is SplitKind.TRAIN_TRAIN:
            tr, va = records, records
        elif kind is SplitKind.AUGMENT_AND_SPLIT:
            pool = _augmented(augmenter, label, records, budget, seed, strategy)
            pool = derive_rng(seed, "splitter", "shuffle", label).sample(pool, len(pool))
            cut = _train_size(strategy.ratio, budget)
            tr, va = pool[:cut], pool[cut:]
        elif kind is SplitKind.AUGTRAIN_TRAIN:
            tr, va = _augmented(augmenter, label, records, budget, seed, strategy), records
        else:
            aug = _augmented(augmenter, label, records, budget, seed, strategy)
            tr, va = aug, aug
        train.extend(tr)
        val.extend(va)
        counts[label] = {"train": len(tr), "val": len(va)}
    train_ds, val_ds = LabeledDataset(train), LabeledDataset(val)
    digest = None
    if kind.augments:
        digest = augmenter.digest() if hasattr(augmenter, "digest") else None
    manifest = {
        "strategy": strategy.name,
        "ratio": strategy.ratio,
        "k": k,
        "budget": budget if kind.augments else None,
        "seed": seed,
        "counts": counts,
        "totals": {"train": len(train_ds), "val": len(val_ds)},
        "augmenter_config_digest": digest,
        "source_sha256": _sha256(source.to_jsonl()),
        "train_sha256": _sha256(train_ds.to_jsonl()),
        "val_sha256": _sha256(val_ds.to_jsonl()),
    }
    return SplitResult(train_ds, val_ds, manifest)


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_split(r, out_dir, force=False, extra=None):
    """Write ``train.jsonl``, ``val.jsonl`` and ``manifest.json`` to ``out_dir``.

    ``extra`` entries are merged into the written manifest (e.g. the run
    configuration).
    """
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise SplitError(f"output directory {out} is not empty (use --force)")
    out.mkdir(parents=True, exist_ok=True)
    manifest = dict(r.manifest)
    if extra:
        manifest.update(extra)
    (out / "train.jsonl").write_text(r.train.to_jsonl(), encoding="utf-8")
    (out / "val.jsonl").write_text(r.val.to_jsonl(), encoding="utf-8")
    (out / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")
    return [out / "train.jsonl", out / "val.jsonl", out / "manifest.json"]


def read_split(out_dir):
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    return read_dataset(out / "train.jsonl"), read_dataset(out / "val.jsonl"), manifest
