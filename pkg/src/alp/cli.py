"""Command line entry point: ``alp {induce,parse,augment,metrics,split}``.

Exit status: 0 on success, 1 on domain errors (bad data, unparseable input,
infeasible budgets), 2 on usage errors.  A TOML ``--config`` file supplies
defaults; top-level keys apply to every subcommand that has the option and a
``[subcommand]`` table overrides them.  Flags given on the command line win.
"""
import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .augmenter import AugmentConfig, ALPAugmenter, build_pools, generate
from .errors import AlpError
from .grammar import binarize_grammar, induce_grammar, load_grammar, load_treebank, save_grammar
from .lexicalizer import default_head_rules, load_head_rules
from .lexicon import load_lexicon
from .metrics import BleuConfig, self_bleu
from .parser import ParserConfig, cky_parse, tree_logprob
from .splitter import (
    STRATEGY_NAMES, LabeledDataset, SplitStrategy, make_split, read_dataset, sample_k_shot,
    tokenize, write_split,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("alp")

REQUIRED = {
    "induce": ("treebank", "out"),
    "parse": ("grammar", "input"),
    "augment": ("dataset", "grammar", "out"),
    "metrics": ("input",),
    "split": ("dataset", "strategy", "k", "out"),
}

# run-local settings left out of manifests so that re-runs into another
# directory produce identical manifests
_NOT_ECHOED = {"out", "force", "log_level", "json", "command", "func"}


class UsageError(Exception):
    pass


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="TOML file with default option values")
    p.add_argument("--log-level", default="WARNING",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    p.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    return p


def _parser_opts():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tau", type=float, default=0.05, help="low-probability rule threshold")
    p.add_argument("--k-best", type=int, default=10, help="trees kept per sentence")
    p.add_argument("--max-len", type=int, default=64, help="longest sentence parsed")
    return p


def _augment_opts():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--grammar", help="grammar file, or 'induce' to induce one from --treebank")
    p.add_argument("--treebank", help="bracketed treebank used with --grammar induce")
    p.add_argument("--lexicon", help="synonym TSV (lemma, pos_class, synonyms)")
    p.add_argument("--head-rules", help="head rule table overriding the built-in one")
    p.add_argument("--budget", type=int, default=200, help="augmented samples per class")
    p.add_argument("--max-swaps", type=int, default=2)
    p.add_argument("--min-span", type=int, default=2)
    p.add_argument("--p-syn", type=float, default=0.5)
    p.add_argument("--p-pool", type=float, default=0.3)
    p.add_argument("--match-head-pos", action="store_true",
                   help="only swap constituents whose heads share a POS")
    p.add_argument("--format", choices=["jsonl", "tsv"], help="dataset format (default: by suffix)")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="alp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"alp {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    common = _common()

    p = sub.add_parser("induce", parents=[common], help="induce a PCFG from a treebank")
    p.add_argument("--treebank", help="bracketed trees")
    p.add_argument("--out", help="grammar file to write")
    p.add_argument("--start", default="S")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("parse", parents=[common, _parser_opts()],
                       help="k-best parse whitespace-tokenized sentences")
    p.add_argument("--grammar", help="grammar file")
    p.add_argument("--in", dest="input", help="one whitespace-tokenized sentence per line")
    p.add_argument("--out", help="dump file (default: stdout)")
    p.add_argument("--json", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("augment", parents=[common, _parser_opts(), _augment_opts()],
                       help="augment every class of a labeled dataset")
    p.add_argument("--dataset", help="labeled JSONL or TSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("--force", action="store_true", help="write into a non-empty directory")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("metrics", parents=[common], help="Self-BLEU of a JSONL set")
    p.add_argument("--in", dest="input", help="JSONL with a text field")
    p.add_argument("--self-bleu", default="2,5", help="comma-separated n-gram orders")
    p.add_argument("--json", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("split", parents=[common, _parser_opts(), _augment_opts()],
                       help="build a train/val split")
    p.add_argument("--dataset", help="labeled JSONL or TSV")
    p.add_argument("--strategy", choices=STRATEGY_NAMES)
    p.add_argument("--k", type=int, help="source records per class and half")
    p.add_argument("--ratio", type=float, help="train share for augment-and-split (default 0.8)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--force", action="store_true", help="write into a non-empty directory")
    p.set_defaults(func=cmd_split)
    return parser, sub.choices


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _file_sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def effective_config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _load_config(path, command, sub):
    with open(path, "rb") as f:
        data = tomllib.load(f)
    known = {a.dest for a in sub._actions}
    values = {k.replace("-", "_"): v for k, v in data.items() if not isinstance(v, dict)}
    values = {k: v for k, v in values.items() if k in known}
    section = data.get(command, {})
    if not isinstance(section, dict):
        raise UsageError(f"config section [{command}] must be a table")
    for k, v in section.items():
        dest = k.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown option {k!r} in config section [{command}]")
        values[dest] = v
    if "in" in section:
        values["input"] = section["in"]
    return values


def _check_dir(out, force):
    out = Path(out)
    if out.exists() and any(out.iterdir()) and not force:
        raise AlpError(f"output directory {out} is not empty (use --force)")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grammar(args):
    if args.grammar is None:
        raise UsageError("--grammar is required")
    if args.grammar == "induce":
        if not args.treebank:
            raise UsageError("--grammar induce needs --treebank")
        g = induce_grammar(load_treebank(args.treebank))
    else:
        g = load_grammar(args.grammar)
    return binarize_grammar(g)


def _head_rules(args):
    return load_head_rules(args.head_rules) if args.head_rules else default_head_rules()


def _augment_config(args):
    return AugmentConfig(
        tau=args.tau, k_best=args.k_best, max_len=args.max_len, min_span=args.min_span,
        max_swaps=args.max_swaps, p_syn=args.p_syn, p_pool=args.p_pool, budget=args.budget,
        seed=args.seed, match_head_pos=args.match_head_pos,
    )


def _inputs(args, names):
    out = {}
    for name in names:
        value = getattr(args, name, None)
        if value and value != "induce" and Path(value).is_file():
            out[name] = _file_sha256(value)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_induce(args):
    trees = load_treebank(args.treebank)
    g = induce_grammar(trees, start=args.start)
    save_grammar(g, args.out)
    log.info("induced %d rules from %d trees", len(g), len(trees))
    print(f"wrote {len(g)} rules from {len(trees)} trees to {args.out}")


def cmd_parse(args):
    g = binarize_grammar(load_grammar(args.grammar))
    cfg = ParserConfig(tau=args.tau, k_best=args.k_best, max_len=args.max_len)
    lines = [l.split() for l in Path(args.input).read_text(encoding="utf-8").splitlines()]
    records = []
    chunks = []
    for i, tokens in enumerate(l for l in lines if l):
        trees = cky_parse(tokens, g, cfg)
        if not trees:
            log.warning("sentence %d has no surviving parse", i)
        records.append({"sentence": " ".join(tokens),
                        "parses": [{"logprob": tree_logprob(t), "tree": t.to_bracket()}
                                   for t in trees]})
        body = "".join(f"{tree_logprob(t):.12g}\t{t.to_bracket()}\n" for t in trees)
        chunks.append(f"# {i}\t{' '.join(tokens)}\n" + (body or "# no parse\n"))
    text = _dump(records) if args.json else "\n".join(chunks)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_augment(args):
    dataset = read_dataset(args.dataset, args.format)
    g = _grammar(args)
    cfg = _augment_config(args)
    out = _check_dir(args.out, args.force)
    lex = load_lexicon(args.lexicon) if args.lexicon else None
    h = _head_rules(args)
    lines = []
    counts, skipped = {}, {}
    for label, records in dataset.by_class().items():
        pools = build_pools(label, [(r.id, tokenize(r.text)) for r in records], g, h, cfg)
        samples = generate(pools, lex, None, cfg)
        lines.extend(json.dumps(s.to_json(), ensure_ascii=False, sort_keys=True) + "\n"
                     for s in samples)
        counts[label] = len(samples)
        skipped[label] = list(pools.skipped)
    body = "".join(lines)
    (out / "augmented.jsonl").write_text(body, encoding="utf-8")
    manifest = {
        "command": "augment",
        "version": __version__,
        "config": effective_config(args),
        "augmenter_config": cfg.to_dict(),
        "augmenter_config_digest": cfg.digest(),
        "inputs": _inputs(args, ("dataset", "grammar", "treebank", "lexicon", "head_rules")),
        "counts": counts,
        "skipped": skipped,
        "outputs": {"augmented.jsonl": hashlib.sha256(body.encode("utf-8")).hexdigest()},
    }
    (out / "manifest.json").write_text(_dump(manifest), encoding="utf-8")
    print(f"wrote {sum(counts.values())} samples for {len(counts)} classes to {out}")


def cmd_metrics(args):
    try:
        orders = [int(x) for x in args.self_bleu.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--self-bleu expects comma-separated integers, got {args.self_bleu!r}")
    if not orders or min(orders) < 1:
        raise UsageError("--self-bleu needs orders >= 1")
    dataset = read_dataset(args.input, "jsonl")
    sentences = [tokenize(r.text) for r in dataset]
    if len(sentences) < 2:
        raise AlpError("Self-BLEU needs at least two sentences")
    scores = {str(n): self_bleu(sentences, BleuConfig(max_n=n)) for n in orders}
    if args.json:
        sys.stdout.write(_dump({
            "self_bleu": scores,
            "n_sentences": len(sentences),
            "tokenizer": "alp.splitter.tokenize",
            "smoothing": None,
            "inputs": _inputs(args, ("input",)),
        }))
    else:
        for n, s in scores.items():
            print(f"self-bleu-{n}\t{s:.6f}")


def cmd_split(args):
    dataset = read_dataset(args.dataset, args.format)
    try:
        strategy = SplitStrategy.parse(args.strategy, args.ratio)
    except AlpError as e:
        raise UsageError(str(e)) from None
    k = args.k
    sampled = any(n != 2 * k for n in dataset.counts().values())
    if sampled:
        train, val, _ = sample_k_shot(dataset, k, args.seed)
        source = LabeledDataset(train.records + val.records)
    else:
        source = dataset
    augmenter = None
    if strategy.kind.augments:
        lex = load_lexicon(args.lexicon) if args.lexicon else None
        augmenter = ALPAugmenter(_grammar(args), _head_rules(args), lex,
                                 config=_augment_config(args))
    result = make_split(source, strategy, k, args.budget if strategy.kind.augments else None,
                        augmenter, args.seed)
    extra = {
        "command": "split",
        "version": __version__,
        "config": effective_config(args),
        "k_shot_sampled": sampled,
        "inputs": _inputs(args, ("dataset", "grammar", "treebank", "lexicon", "head_rules")),
    }
    write_split(result, args.out, force=args.force, extra=extra)
    totals = result.manifest["totals"]
    print(f"{strategy.name}: {totals['train']} train / {totals['val']} val records in {args.out}")


# ---------------------------------------------------------------------------


def run(argv=None):
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
        sub = subs[args.command]
        if args.config:
            try:
                defaults = _load_config(args.config, args.command, sub)
            except (OSError, tomllib.TOMLDecodeError) as e:
                raise UsageError(f"cannot read config {args.config}: {e}") from None
            sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
        missing = [n for n in REQUIRED[args.command] if getattr(args, n, None) is None]
        if missing:
            raise UsageError("missing required option(s): " + ", ".join(
                "--" + ("in" if n == "input" else n.replace("_", "-")) for n in missing))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except UsageError as e:
        subs[args.command].print_usage(sys.stderr)
        print(f"alp {args.command}: error: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)
    try:
        args.func(args)
    except UsageError as e:
        subs[args.command].print_usage(sys.stderr)
        print(f"alp {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (AlpError, OSError, ValueError) as e:
        log.error("%s", e)
        print(f"alp {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
