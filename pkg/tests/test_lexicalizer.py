import pytest

from alp.errors import HeadRuleError
from alp.grammar import binarize_grammar, parse_tree
from alp.lexicalizer import (
    HeadRuleTable, extract_subtrees, lexicalize, load_head_rules, parse_head_rules,
)
from alp.parser import ParserConfig, cky_parse
from alp.toydata import PP_SENTENCE, pp_grammar, review_treebank
from support import pp_tree_a


def test_head_rule_line():
    table = parse_head_rules("VP left-to-right VB VBD MD VP")
    assert table.entries["VP"] == ("left-to-right", ("VB", "VBD", "MD", "VP"))


def test_empty_file_is_fallback_only(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    table = load_head_rules(p)
    assert table.entries == {}
    assert table.head_index("NP", ["DT", "NN"]) == 1


def test_duplicate_parent():
    with pytest.raises(HeadRuleError, match="duplicate head rule NP"):
        parse_head_rules("NP right-to-left NN\nNP left-to-right DT")


def test_invalid_tables():
    with pytest.raises(HeadRuleError):
        parse_head_rules("NP sideways NN")
    with pytest.raises(HeadRuleError):
        HeadRuleTable({}, fallback="middle")


def test_preterminal_head():
    lt = lexicalize(parse_tree("(NN dogs)"), parse_head_rules(""))
    assert (lt.head_word, lt.head_pos) == ("dogs", "NN")


def test_fallback_side():
    t = parse_tree("(X (A a) (B b))")
    assert lexicalize(t, parse_head_rules("", "rightmost")).head_word == "b"
    assert lexicalize(t, parse_head_rules("", "leftmost")).head_word == "a"


def test_priority_order_beats_position():
    table = parse_head_rules("VP left-to-right VBD NN")
    lt = lexicalize(parse_tree("(VP (NN x) (VBD y))"), table)
    assert lt.head_word == "y"


def test_head_consistency_on_corpus(head_rules):
    for _, t in review_treebank(10, 0):
        lt = lexicalize(t, head_rules)
        assert lt.head_word in t.words()
        for node in lt.nodes():
            if node.children and not node.is_preterminal:
                assert any((c.head_word, c.head_pos) == (node.head_word, node.head_pos)
                           for c in node.children)


def test_extract_pp_fixture(head_rules):
    lt = lexicalize(pp_tree_a(), head_rules)
    subs = extract_subtrees(lt, {"NP", "PP"}, 2, "c", "s0")
    assert [(s.root_label, " ".join(s.words)) for s in subs] == [
        ("NP", "the man"), ("PP", "with a telescope"), ("NP", "a telescope")]
    assert all(s.source_class == "c" and s.source_sentence_id == "s0" for s in subs)
    assert subs[1].head_word == "with"
    assert extract_subtrees(lt, {"X"}, 2) == []
    assert extract_subtrees(lt, {"NP", "PP"}, 8) == []


def test_parser_output_lexicalizes(head_rules):
    trees = cky_parse(PP_SENTENCE, binarize_grammar(pp_grammar()), ParserConfig(tau=0.1))
    heads = [lexicalize(t, head_rules).head_word for t in trees]
    assert heads == ["saw", "saw"]
    for t in trees:
        for s in extract_subtrees(lexicalize(t, head_rules)):
            assert 0 <= s.tree.span[0] < s.tree.span[1] <= len(PP_SENTENCE)
            assert s.tree.span != (0, len(PP_SENTENCE)) or s.root_label != "S"
