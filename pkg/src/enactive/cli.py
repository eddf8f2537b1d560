"""Command-line front end.

Exit codes: 0 success, 1 a check or property failed, 2 usage error, 3 bad
input, capacity or degenerate-universe errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import (
    CapacityError,
    ConfigError,
    DegenerateUniverseError,
    EnactiveError,
    IncorrectPolicyError,
    InvalidStatementError,
    IrrecoverableCollectiveError,
    NotOverConstrainedError,
    TaskValidationError,
    UnlearnableError,
    VocabularyMismatchError,
)
from .experiments import (
    GENERATOR,
    GENERALIZATION_CSV_HEADER,
    ExperimentConfig,
    compare_proxies,
    default_proxies,
    random_universe,
    trial_rng,
    validate_all,
)
from .loaders import load_collective, load_scenario, load_task, load_universe
from .mca import build_state, collective_policies, conflict_matrix, splinter
from .report import FORMATS, DestinationError, Table, csv_writer, emit_report, open_destination
from .tasks import Proxy, correct_policy_bits, learn, task_level, utility
from .universe import DEFAULT_STATE_CAP, DEFAULT_VOCAB_CAP, Language, Vocabulary, language_for

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

COMMANDS = {
    "lang": "enumerate the language of a universe file (or a seeded random universe)",
    "task": "validate a task file and list its correct policies and utility",
    "learn": "learn a policy for a task file under a proxy",
    "validate": "check the generalisation, necessity, monotonicity and efficiency properties",
    "compare": "compare learning proxies on seeded random task pairs",
    "mca": "realise a layered scenario file level by level",
    "splinter": "find the smallest removal that restores a shared policy in a collective file",
}


def _proxy(text: str) -> Proxy:
    try:
        return Proxy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must be in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("options")
    g.add_argument("--config", metavar="PATH", help="experiment config JSON (flags override its fields)")
    g.add_argument("--file", metavar="PATH", help="universe, task, scenario or collective JSON")
    g.add_argument("--seed", type=int, metavar="N", help="master seed")
    g.add_argument("--trials", type=int, metavar="N", help="number of sampled trials")
    g.add_argument("--states", type=int, metavar="N", help="number of states")
    g.add_argument("--vocab", type=int, metavar="N", help="number of programs in the vocabulary")
    g.add_argument("--density", type=_unit, metavar="F", help="probability of each state bit in a sampled program")
    g.add_argument("--proxy", type=_proxy, action="append", metavar="NAME",
                   help="weakness, simplicity, random or random:SEED (repeat for compare)")
    g.add_argument("--format", choices=FORMATS, default="json", help="report format (default json)")
    g.add_argument("--output", metavar="PATH", help="write the report here instead of standard output")
    g.add_argument("--mode", choices=("exhaustive", "sampled"), help="validation mode")
    g.add_argument("--cap-states", type=int, metavar="N", help=f"universe size cap (default {DEFAULT_STATE_CAP})")
    g.add_argument("--cap-vocab", type=int, metavar="N", help=f"vocabulary size cap (default {DEFAULT_VOCAB_CAP})")

    parser = argparse.ArgumentParser(
        prog="enactive",
        description="Tasks, policies and layered abstractions over finite universes.",
        epilog="Exit codes: 0 success, 1 check failed, 2 usage error, 3 input/capacity error. "
               "Set ENACTIVE_NO_CACHE=1 to disable memoisation.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, text in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _caps(args: argparse.Namespace) -> tuple[int, int]:
    return (args.cap_states or DEFAULT_STATE_CAP, args.cap_vocab or DEFAULT_VOCAB_CAP)


def _config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "seed": args.seed, "trial_count": args.trials, "state_count": args.states,
        "vocab_size": args.vocab, "density": args.density, "mode": args.mode,
        "state_cap": args.cap_states, "vocab_cap": args.cap_vocab,
    }
    if args.config:
        return ExperimentConfig.load(args.config, **overrides)
    return ExperimentConfig.from_dict({}, **overrides)


def _need_file(args: argparse.Namespace) -> str:
    if not args.file:
        raise ConfigError(f"{args.command} needs --file PATH")
    return args.file


def _one_proxy(args: argparse.Namespace, default: Proxy) -> Proxy:
    if not args.proxy:
        return default
    if len(args.proxy) > 1:
        raise ConfigError(f"{args.command} takes a single --proxy")
    return args.proxy[0]


def _programs(vocab: Vocabulary, x) -> list[str]:
    return [vocab.universe.format_program(p) for p in vocab.programs_of(x)]


def _policy_entry(lang: Language, k: int) -> dict:
    x = lang.at(k)
    return {"policy": lang.vocab.format_statement(x), "programs": _programs(lang.vocab, x),
            "weakness": lang.ext_bits(k).bit_count()}


def cmd_lang(args: argparse.Namespace) -> int:
    state_cap, vocab_cap = _caps(args)
    if args.file:
        vocab = load_universe(args.file, state_cap, vocab_cap)
        lang = language_for(vocab)
        header = {}
    else:
        config = _config(args)
        _, vocab, lang = random_universe(config, trial_rng(config.seed, 0))
        header = {"generator": GENERATOR, "seed": config.seed}
    fmt = vocab.format_statement
    rows, entries = [], []
    for k, x in enumerate(lang):
        ext = [fmt(y) for y in lang.sorted_statements(lang.ext_bits(k))]
        entries.append({"statement": fmt(x), "programs": _programs(vocab, x),
                        "weakness": len(ext), "extension": ext})
        rows.append((fmt(x), " ".join(_programs(vocab, x)), len(ext), " ".join(ext)))
    payload = {**header, "universe": vocab.to_json(), "language_size": len(lang), "statements": entries}
    emit_report(Table(payload, ("statement", "programs", "weakness", "extension"), rows),
                args.format, args.output)
    return EXIT_OK


def cmd_task(args: argparse.Namespace) -> int:
    task = load_task(_need_file(args), *_caps(args))
    lang = task.lang
    pis = correct_policy_bits(task)
    entries = [_policy_entry(lang, k) for k in range(len(lang)) if pis >> k & 1]
    payload = {
        "universe": lang.vocab.to_json(),
        "task": task.to_json(),
        "level": task_level(task),
        "correct_policies": entries,
        "utility": utility(task) if pis else None,
    }
    rows = [(e["policy"], " ".join(e["programs"]), e["weakness"]) for e in entries]
    emit_report(Table(payload, ("policy", "programs", "weakness"), rows), args.format, args.output)
    return EXIT_OK


def cmd_learn(args: argparse.Namespace) -> int:
    task = load_task(_need_file(args), *_caps(args))
    proxy = _one_proxy(args, Proxy("weakness"))
    policy = learn(task, proxy)
    lang = task.lang
    entry = _policy_entry(lang, lang.ordinal(policy))
    payload = {"task": task.to_json(), "proxy": proxy.name,
               "correct_policy_count": correct_policy_bits(task).bit_count(), **entry}
    row = (proxy.name, entry["policy"], " ".join(entry["programs"]), entry["weakness"])
    emit_report(Table(payload, ("proxy", "policy", "programs", "weakness"), [row]), args.format, args.output)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = _config(args)
    if args.format == "csv":
        with open_destination(args.output) as fh:
            w = csv_writer(fh)
            w.writerow(GENERALIZATION_CSV_HEADER)
            report = validate_all(config, sink=w.writerow)
    else:
        report = validate_all(config)
        emit_report(report, "json", args.output)
    if not report.passed:
        print("validation failed: see report for counterexamples", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = _config(args)
    proxies = args.proxy or default_proxies(config)
    try:
        result = compare_proxies(config, proxies)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    emit_report(result, args.format, args.output)
    return EXIT_OK


def cmd_mca(args: argparse.Namespace) -> int:
    scenario = load_scenario(_need_file(args), *_caps(args))
    proxy = _one_proxy(args, scenario.proxy)
    state = build_state(scenario.stack, scenario.base, proxy, scenario.pins)
    payload = {"universe": scenario.base.to_json(), **state.to_json()}
    rows = [
        (lv["level"], " ".join(lv["vocabulary"]), lv["correct_policy_count"], lv["policy"] or "",
         " ".join(lv["policy_programs"] or ()), "" if lv["weakness"] is None else lv["weakness"],
         "" if lv["utility"] is None else lv["utility"], "true" if lv["pinned"] else "false")
        for lv in payload["levels"]
    ]
    header = ("level", "vocabulary", "correct_policies", "policy", "policy_programs", "weakness",
              "utility", "pinned")
    emit_report(Table(payload, header, rows), args.format, args.output)
    return EXIT_OK


def cmd_splinter(args: argparse.Namespace) -> int:
    collective = load_collective(_need_file(args), *_caps(args))
    lang = collective.lang
    fmt = lang.vocab.format_statement
    cp = collective_policies(collective)
    conflicts = conflict_matrix(collective)
    payload = {
        "universe": lang.vocab.to_json(),
        "parts": [p.to_json() for p in collective.parts],
        "whole": collective.whole.to_json(),
        "whole_policies": sorted(fmt(x) for x in cp.policies),
        "shared_policies": sorted(fmt(x) for x in cp.shared),
        "conflicts": conflicts,
    }
    try:
        result = splinter(collective)
    except (NotOverConstrainedError, IrrecoverableCollectiveError) as exc:
        payload["result"] = None
        payload["error"] = str(exc)
        emit_report(Table(payload, ("part", "role", "inputs", "outputs", "correct_before", "correct_after"), []),
                    args.format, args.output)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    payload["result"] = result.to_json()
    rows = []
    before = {id(r.part): r for r in result.rows}
    for i, part in enumerate(collective.parts):
        role = "discarded" if any(part is d for d in result.discarded) else "retained"
        r = before.get(id(part))
        rows.append((i, role, " ".join(part.to_json()["inputs"]), " ".join(part.to_json()["outputs"]),
                     "" if r is None else r.correct_before, "" if r is None else r.correct_after))
    emit_report(Table(payload, ("part", "role", "inputs", "outputs", "correct_before", "correct_after"), rows),
                args.format, args.output)
    return EXIT_OK


HANDLERS = {
    "lang": cmd_lang, "task": cmd_task, "learn": cmd_learn, "validate": cmd_validate,
    "compare": cmd_compare, "mca": cmd_mca, "splinter": cmd_splinter,
}

INPUT_ERRORS = (
    ConfigError, CapacityError, DegenerateUniverseError, TaskValidationError, InvalidStatementError,
    VocabularyMismatchError, IncorrectPolicyError, DestinationError, ValueError,
)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return HANDLERS[args.command](args)
    except UnlearnableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EnactiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
