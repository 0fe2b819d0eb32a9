"""Unsmoothed BLEU and Self-BLEU."""
import math
from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True)
class BleuConfig:
    max_n: int = 4
    brevity_penalty: bool = True

    def __post_init__(self):
        if self.max_n < 1:
            raise ValueError(f"max_n must be >= 1, got {self.max_n}")


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate, references, cfg=None):
    """Sentence BLEU of ``candidate`` against ``references``.

    Modified n-gram precisions (clipped by the maximum count in any single
    reference) for n = 1..max_n, combined by geometric mean, times the
    brevity penalty exp(1 - r/c) when the candidate is shorter than the
    closest reference length r (ties go to the shorter reference).  Any
    zero precision makes the score 0.  Orders longer than the candidate are
    skipped (effective order), so an exact match always scores 1.
    """
    cfg = cfg or BleuConfig()
    references = [list(r) for r in references]
    if not references:
        raise ValueError("bleu needs at least one reference")
    candidate = list(candidate)
    c = len(candidate)
    if c == 0:
        return 0.0
    log_total = 0.0
    orders = min(cfg.max_n, c)
    for n in range(1, orders + 1):
        cand = _ngrams(candidate, n)
        total = sum(cand.values())
        max_ref = Counter()
        for ref in references:
            for gram, count in _ngrams(ref, n).items():
                if count > max_ref[gram]:
                    max_ref[gram] = count
        clipped = sum(min(count, max_ref[gram]) for gram, count in cand.items())
        if clipped == 0:
            return 0.0
        log_total += math.log(clipped / total)
    score = math.exp(log_total / orders)
    if cfg.brevity_penalty:
        r = min((len(ref) for ref in references), key=lambda length: (abs(length - c), length))
        if c < r:
            score *= math.exp(1.0 - r / c)
    return min(score, 1.0)


def self_bleu(sentences, cfg=None):
    """Mean BLEU of each sentence against all the others (lower = more diverse)."""
    sentences = [list(s) for s in sentences]
    if len(sentences) < 2:
        raise ValueError("self_bleu needs at least two sentences")
    scores = [
        bleu(s, sentences[:i] + sentences[i + 1:], cfg) for i, s in enumerate(sentences)
    ]
    return math.fsum(scores) / len(scores)
