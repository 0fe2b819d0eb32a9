"""Augment a tiny two-class review corpus and measure diversity.

Run: python demos/02_augment_reviews.py
"""
from alp import (
    AugmentConfig, BleuConfig, binarize_grammar, build_pools, eda_augment, generate,
    grammatical, induce_grammar, self_bleu,
)
from alp.lexicalizer import default_head_rules
from alp.lexicon import parse_lexicon
from alp.rng import derive_rng
from alp.toydata import REVIEW_LEXICON_TSV, review_treebank

# A gold treebank of 30 sentences per class doubles as the grammar's source.
treebank = review_treebank(30, seed=0)
grammar = binarize_grammar(induce_grammar([t for _, t in treebank]))
lexicon = parse_lexicon(REVIEW_LEXICON_TSV)
heads = default_head_rules()
print(f"induced {len(grammar.unbinarized)} rules ({len(grammar)} after binarization)")

# Few-shot setting: 5 source sentences per class, 200 augmented samples each.
cfg = AugmentConfig(budget=200, seed=42)
for label in ("pos", "neg"):
    source = [(f"{label}{i}", t.words()) for i, (l, t) in enumerate(treebank) if l == label][:5]
    pools = build_pools(label, source, grammar, heads, cfg)
    samples = generate(pools, lexicon, None, cfg)
    ok = sum(grammatical(s, grammar, pools) for s in samples)
    print(f"\n[{label}] {len(pools.tree_bank)} trees from {len(source)} sentences; "
          f"{len(samples)} samples, {ok} re-parse")
    for s in samples[:4]:
        print("   ", " ".join(s.text))

    # Compare against the EDA baseline on the same source sentences.
    rng = derive_rng(42, "eda", label)
    eda = [eda_augment(source[i % 5][1], alpha=0.1, rng=rng, lexicon=lexicon)
           for i in range(200)]
    for n in (2, 5):
        b = BleuConfig(max_n=n)
        print(f"    Self-BLEU-{n}: source {self_bleu([s for _, s in source], b):.3f}"
              f"  grammar {self_bleu([s.text for s in samples], b):.3f}"
              f"  eda {self_bleu(eda, b):.3f}")
