import json
import subprocess
import sys

import pytest

from alp.cli import run
from alp.grammar import load_grammar
from alp.toydata import write_review_corpus


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    paths = write_review_corpus(d)
    paths["grammar"] = str(d / "grammar.txt")
    assert run(["induce", "--treebank", paths["treebank"], "--out", paths["grammar"]]) == 0
    return paths


def test_induce_writes_grammar(files):
    g = load_grammar(files["grammar"])
    assert g.start == "S" and len(g) > 20


def test_parse_dump(files, tmp_path, capsys):
    src = tmp_path / "s.txt"
    src.write_text("she loved the movie .\nthe plot drags\n")
    assert run(["parse", "--grammar", files["grammar"], "--in", str(src), "--k-best", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "# 0\tshe loved the movie ."
    logp, tree = out[1].split("\t")
    assert float(logp) < 0 and tree.startswith("(S ")
    assert "# no parse" in out
    assert run(["parse", "--grammar", files["grammar"], "--in", str(src), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data[1]["parses"] == []


def test_augment_twice_identical(files, tmp_path):
    args = ["augment", "--dataset", files["dataset"], "--grammar", files["grammar"],
            "--lexicon", files["lexicon"], "--budget", "5", "--seed", "7", "--out"]
    assert run(args + [str(tmp_path / "a")]) == 0
    assert run(args + [str(tmp_path / "b")]) == 0
    for name in ("augmented.jsonl", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = [json.loads(l) for l in (tmp_path / "a" / "augmented.jsonl").read_text().splitlines()]
    assert len(rows) == 10 and set(rows[0]) == {"text", "label", "provenance"}
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["counts"] == {"neg": 5, "pos": 5}
    assert manifest["config"]["budget"] == 5


def test_augment_induce_grammar(files, tmp_path):
    assert run(["augment", "--dataset", files["dataset"], "--grammar", "induce", "--treebank",
                files["treebank"], "--budget", "3", "--out", str(tmp_path / "o")]) == 0
    assert run(["augment", "--dataset", files["dataset"], "--grammar", "induce",
                "--budget", "3", "--out", str(tmp_path / "p")]) == 2


def test_usage_errors(files, capsys):
    assert run(["split", "--strategy", "bogus"]) == 2
    assert "invalid choice" in capsys.readouterr().err
    assert run(["frobnicate"]) == 2
    assert run(["induce", "--nope"]) == 2
    assert run(["induce", "--treebank", files["treebank"]]) == 2
    assert "--out" in capsys.readouterr().err
    assert run(["metrics", "--in", files["dataset"], "--self-bleu", "x"]) == 2


def test_domain_errors(files, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("(S (NP")
    assert run(["induce", "--treebank", str(bad), "--out", str(tmp_path / "g")]) == 1
    assert "unbalanced" in capsys.readouterr().err
    assert run(["induce", "--treebank", str(tmp_path / "missing"), "--out", "x"]) == 1
    assert run(["split", "--dataset", files["dataset"], "--strategy", "train-val", "--k",
                "100", "--out", str(tmp_path / "s")]) == 1


def test_metrics(files, capsys):
    assert run(["metrics", "--in", files["dataset"], "--self-bleu", "2,5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l.split("\t")[0] for l in lines] == ["self-bleu-2", "self-bleu-5"]
    assert run(["metrics", "--in", files["dataset"], "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data["self_bleu"]) == {"2", "5"}
    assert data["tokenizer"] == "alp.splitter.tokenize"


def test_split_and_config_precedence(files, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('seed = 3\ntau = 0.1\n[split]\nbudget = 7\nk = 5\nstrategy = "augtrain-val"\n')
    base = ["split", "--config", str(cfg), "--dataset", files["dataset"],
            "--grammar", files["grammar"]]
    assert run(base + ["--out", str(tmp_path / "s1")]) == 0
    m = json.loads((tmp_path / "s1" / "manifest.json").read_text())
    assert m["counts"]["pos"] == {"train": 7, "val": 5}
    assert m["config"]["tau"] == 0.1 and m["seed"] == 3 and m["k_shot_sampled"]
    assert run(base + ["--budget", "4", "--out", str(tmp_path / "s2")]) == 0
    m = json.loads((tmp_path / "s2" / "manifest.json").read_text())
    assert m["counts"]["pos"] == {"train": 4, "val": 5}
    assert run(base + ["--out", str(tmp_path / "s2")]) == 1
    assert run(base + ["--out", str(tmp_path / "s2"), "--force"]) == 0
    cfg.write_text("[split]\nbogus = 1\n")
    assert run(base + ["--out", str(tmp_path / "s3")]) == 2


def test_console_script_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "alp.cli", "split", "--strategy", "bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage:" in proc.stderr
