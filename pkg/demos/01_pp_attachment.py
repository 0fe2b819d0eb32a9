"""Threshold-filtered parsing on the classic PP-attachment sentence.

Run: python demos/01_pp_attachment.py
"""
import math

from alp import ParserConfig, binarize_grammar, cky_parse, lexicalize, tree_logprob
from alp.lexicalizer import default_head_rules, extract_subtrees
from alp.toydata import PP_GRAMMAR_TEXT, PP_SENTENCE, pp_grammar

print("Grammar:")
print(PP_GRAMMAR_TEXT)
g = binarize_grammar(pp_grammar())
print("Sentence:", " ".join(PP_SENTENCE))

# With tau = 0.1 both attachment rules (0.3 and 0.2) clear the threshold, so
# both analyses survive.  At tau = 0.25, NP -> NP PP (0.2) is contested and
# removed, leaving only the VP attachment.
for tau in (0.1, 0.25):
    trees = cky_parse(PP_SENTENCE, g, ParserConfig(tau=tau))
    print(f"\ntau = {tau}: {len(trees)} tree(s)")
    for t in trees:
        print(f"  p = {math.exp(tree_logprob(t)):.2e}  {t.to_bracket()}")

# Lexicalize the best tree and list the constituents available for swapping.
best = lexicalize(cky_parse(PP_SENTENCE, g, ParserConfig(tau=0.1))[0], default_head_rules())
print(f"\nroot head: {best.head_word} ({best.head_pos})")
for sub in extract_subtrees(best, {"NP", "PP"}):
    print(f"  {sub.root_label}({sub.head_word}): {' '.join(sub.words)}")
