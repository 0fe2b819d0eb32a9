"""Data augmentation with lexicalized probabilistic context-free grammars."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlpError, AugmentError, BudgetError, DatasetError, GrammarError, HeadRuleError,
    LexiconError, OracleBoundError, ParseError, SplitError, TreebankError,
)
from .grammar import (  # noqa: E402
    Grammar, ParseTree, Rule, binarize_grammar, debinarize_tree, induce_grammar, load_grammar,
    load_treebank, parse_tree, parse_trees, save_grammar, tree_probability, with_lexical_rules,
)
from .parser import ParserConfig, brute_force_parse, cky_parse, tree_logprob  # noqa: E402
from .lexicalizer import (  # noqa: E402
    HeadRuleTable, LexTree, Subtree, default_head_rules, extract_subtrees, lexicalize,
    load_head_rules, parse_head_rules,
)
from .lexicon import SynonymLexicon, load_lexicon, parse_lexicon, synonyms  # noqa: E402
from .augmenter import (  # noqa: E402
    ALPAugmenter, AugmentConfig, AugmentedSample, ClassPools, build_pools, eda_augment,
    generate, grammatical, substitute_words, swap_subtrees,
)
from .metrics import BleuConfig, bleu, self_bleu  # noqa: E402
from .splitter import (  # noqa: E402
    LabeledDataset, Record, SplitKind, SplitResult, SplitStrategy, make_split, read_dataset,
    read_split, sample_k_shot, tokenize, write_split,
)
from .rng import derive_rng, derive_seed  # noqa: E402
