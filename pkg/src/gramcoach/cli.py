"""Umbrella command line: validate | analyze | parse | check | profile |
compare | train-supertagger | serve.

Exit codes: 0 success, 1 domain failure (invalid grammar, verdict
regression, no parse where one was required), 2 usage error."""

from __future__ import annotations

import argparse
import json
import sys

from . import chart, coaching, grammar as gr, morph, profiling, semantics, supertag, treebank
from .errors import CoachError, GrammarLoadError, InputError
from .resources import load_bundled_or_path, load_suite_or_path, load_treebank_or_path
from .service import render_derivation


def _grammar_pair(name, max_chain=3):
    source = load_bundled_or_path(name)
    return (
        gr.load_grammar(source, "learner", max_chain),
        gr.load_grammar(source, "strict", max_chain),
    )


def _parse_options(args):
    opts = chart.ParseOptions()
    if getattr(args, "no_rule_filter", False):
        opts.rule_filter = False
    model_path = getattr(args, "supertag_model", None)
    k = getattr(args, "supertag", None)
    if bool(model_path) != bool(k):
        raise InputError("--supertag and --supertag-model must be given together")
    if model_path and k:
        with open(model_path, encoding="utf-8") as handle:
            opts.supertag_model = supertag.load_model(handle.read())
        opts.supertag_k = k
    return opts


def cmd_validate(args):
    try:
        source = load_bundled_or_path(args.grammar_file)
        gr.load_grammar(source, args.mode)
    except GrammarLoadError as exc:
        print(json.dumps(exc.report()))
        return 1
    except InputError as exc:
        print(json.dumps({"kind": "input", "location": "", "detail": str(exc)}))
        return 1
    print(json.dumps({"kind": "ok", "location": "", "detail": args.grammar_file}))
    return 0


def cmd_analyze(args):
    grammar, _ = _grammar_pair(args.grammar)
    token = args.token.lower()
    for analysis in morph.analyze_token(token, grammar):
        print(f"{analysis.token}\t{analysis.lemma}\t{analysis.tag}")
    return 0


def cmd_parse(args):
    source = load_bundled_or_path(args.grammar)
    grammar = gr.load_grammar(source, args.mode)
    tokens = [t.text for t in morph.tokenize(args.sentence)]
    if not tokens:
        print("no tokens", file=sys.stderr)
        return 1
    result = chart.parse(tokens, grammar, _parse_options(args))
    print(f"{len(result.readings)} reading(s)")
    for n, reading in enumerate(result.readings, start=1):
        print(f"--- reading {n}")
        if args.dump_deriv:
            print(render_derivation(reading.derivation, tokens))
        if args.dump_fs:
            print(reading.root_edge.fs.canonical())
        if args.dump_deps:
            print(semantics.to_dependencies(reading.semantics).render())
    if args.stats:
        print(json.dumps(result.stats.as_dict(), sort_keys=True))
    return 0


def cmd_check(args):
    learner, strict = _grammar_pair(args.grammar)
    verdict = coaching.coach_sentence(args.sentence, learner, strict, _parse_options(args))
    print(f"verdict: {verdict.kind}")
    for item in verdict.feedback:
        expected = item.expected if item.expected is not None else "?"
        print(
            f'[{item.category}] {item.token_span} "{item.surface}" -> '
            f'"{expected}": {item.message}'
        )
    if verdict.corrected:
        print(f"corrected: {verdict.corrected}")
    for diag in verdict.diagnostics:
        print(f"note: {diag}")
    return 0


def cmd_profile(args):
    source = load_bundled_or_path(args.grammar)
    grammar = gr.load_grammar(source, args.mode)
    suite = profiling.load_suite(load_suite_or_path(args.suite))
    profile = profiling.run_profile(suite, grammar, _parse_options(args))
    out = profile.to_json()
    if args.out == "-":
        sys.stdout.write(out)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(out)
        agg = profile.aggregates
        print(
            f"{args.out}: {agg['items']} items, coverage {agg['coverage_pct']:.1f}%, "
            f"overgeneration {agg['overgeneration_pct']:.1f}%, "
            f"mean readings {agg['mean_readings_covered']:.2f}"
        )
    return 0


def cmd_compare(args):
    with open(args.left, encoding="utf-8") as handle:
        left = profiling.Profile.from_json(handle.read())
    with open(args.right, encoding="utf-8") as handle:
        right = profiling.Profile.from_json(handle.read())
    comparison = profiling.compare_profiles(left, right)
    print(comparison.render())
    return 1 if comparison.regressions else 0


def cmd_train_supertagger(args):
    _, strict = _grammar_pair(args.grammar)
    items = treebank.load_treebank(load_treebank_or_path(args.treebank))
    model = supertag.train(items, strict)
    text = supertag.save_model(model)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"{args.out}: {len(items)} items, {len(model.signatures)} signatures")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.from_file(args.config) if args.config else ServiceConfig.from_env()
    app = create_app(config)
    host, _, port = config.listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coach", description="Desk-scale grammar coaching engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a grammar file; JSON error report")
    p.add_argument("grammar_file")
    p.add_argument("--mode", choices=["strict", "learner"], default="learner")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="morphological analyses of a token")
    p.add_argument("token")
    p.add_argument("--grammar", default="toy")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("parse", help="parse a sentence and dump analyses")
    p.add_argument("sentence")
    p.add_argument("--grammar", default="toy")
    p.add_argument("--mode", choices=["strict", "learner"], default="strict")
    p.add_argument("--no-rule-filter", action="store_true")
    p.add_argument("--supertag", type=int, metavar="K")
    p.add_argument("--supertag-model", metavar="FILE")
    p.add_argument("--dump-fs", action="store_true")
    p.add_argument("--dump-deriv", action="store_true")
    p.add_argument("--dump-deps", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", help="coach a sentence (strict, then learner)")
    p.add_argument("sentence")
    p.add_argument("--grammar", default="toy")
    p.add_argument("--no-rule-filter", action="store_true")
    p.add_argument("--supertag", type=int, metavar="K")
    p.add_argument("--supertag-model", metavar="FILE")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("profile", help="run a test suite and store a profile")
    p.add_argument("--grammar", required=True)
    p.add_argument("--mode", choices=["strict", "learner"], default="strict")
    p.add_argument("--suite", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-rule-filter", action="store_true")
    p.add_argument("--supertag", type=int, metavar="K")
    p.add_argument("--supertag-model", metavar="FILE")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="diff two stored profiles")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("train-supertagger", help="train the lexical filter model")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grammar", default="toy")
    p.set_defaults(func=cmd_train_supertagger)

    p = sub.add_parser("serve", help="run the HTTP coaching service")
    p.add_argument("--config", metavar="FILE")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CoachError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
