"""Reading universes, tasks, stacks and collectives from JSON files.

Programs are 0/1 strings with the highest state first.  A statement is
either a list of program strings or a 0/1 string over the vocabulary in the
same orientation.  Errors are :class:`ConfigError` naming the file and the
offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CapacityError, ConfigError, InvalidStatementError, TaskValidationError
from .mca import Collective, McaStack, UninstantiatedTask, no_abstraction_language
from .tasks import Proxy, Task, make_task
from .universe import (
    DEFAULT_STATE_CAP,
    DEFAULT_VOCAB_CAP,
    Language,
    Statement,
    Universe,
    Vocabulary,
    language_for,
)


def read_json(path: str) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror or exc})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(data: object, key: str, where: str) -> object:
    if not isinstance(data, dict) or key not in data:
        raise ConfigError(f"{where}: missing field {key!r}")
    return data[key]


def _list(value: object, where: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    return value


def parse_universe(data: object, where: str, state_cap: int = DEFAULT_STATE_CAP,
                   vocab_cap: int = DEFAULT_VOCAB_CAP) -> Vocabulary:
    n = _field(data, "state_count", where)
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"{where}.state_count: expected an integer")
    try:
        universe = Universe(n, state_cap)
    except CapacityError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}.state_count: {exc}") from None
    progs = _list(_field(data, "vocabulary", where), f"{where}.vocabulary")
    parsed = []
    for i, text in enumerate(progs):
        try:
            parsed.append(universe.parse_program(text) if isinstance(text, str) else None)
        except ValueError as exc:
            raise ConfigError(f"{where}.vocabulary[{i}]: {exc}") from None
        if parsed[-1] is None:
            raise ConfigError(f"{where}.vocabulary[{i}]: expected a 0/1 string")
    try:
        return Vocabulary.of(universe, parsed, cap=vocab_cap)
    except CapacityError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}.vocabulary: {exc}") from None


def parse_statement(value: object, lang: Language, where: str) -> Statement:
    vocab = lang.vocab
    try:
        if isinstance(value, str):
            x = vocab.parse_statement(value)
        elif isinstance(value, list) and all(isinstance(p, str) for p in value):
            x = vocab.statement(vocab.universe.parse_program(p) for p in value)
        else:
            raise ConfigError(f"{where}: expected a 0/1 string or a list of programs")
    except InvalidStatementError as exc:
        raise InvalidStatementError(f"{where}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from None
    if x not in lang:
        raise InvalidStatementError(
            f"{where}: {vocab.format_statement(x)} is not a statement (empty, or its programs share no state)"
        )
    return x


def parse_task(data: object, lang: Language, where: str) -> Task:
    ins = [parse_statement(v, lang, f"{where}.inputs[{i}]")
           for i, v in enumerate(_list(_field(data, "inputs", where), f"{where}.inputs"))]
    outs = [parse_statement(v, lang, f"{where}.outputs[{i}]")
            for i, v in enumerate(_list(_field(data, "outputs", where), f"{where}.outputs"))]
    try:
        return make_task(ins, outs, lang)
    except TaskValidationError as exc:
        raise _retag(exc, where) from None


def _retag(exc: TaskValidationError, where: str) -> TaskValidationError:
    exc.args = (f"{where}: {exc.args[0]}",) + exc.args[1:]
    return exc


def load_universe(path: str, state_cap: int = DEFAULT_STATE_CAP, vocab_cap: int = DEFAULT_VOCAB_CAP
                  ) -> Vocabulary:
    """A universe file, or any file with a ``universe`` object."""
    data = read_json(path)
    if isinstance(data, dict) and "universe" in data:
        return parse_universe(data["universe"], f"{path}: universe", state_cap, vocab_cap)
    return parse_universe(data, path, state_cap, vocab_cap)


def load_task(path: str, state_cap: int = DEFAULT_STATE_CAP, vocab_cap: int = DEFAULT_VOCAB_CAP) -> Task:
    data = read_json(path)
    vocab = parse_universe(_field(data, "universe", path), f"{path}: universe", state_cap, vocab_cap)
    return parse_task(data, language_for(vocab), path)


@dataclass(frozen=True)
class Scenario:
    """A stack to realise, the base vocabulary, a proxy and pinned levels.

    A pin lists the programs of the policy fixed at that level; it is matched
    against the level's vocabulary when the stack is realised.
    """

    stack: McaStack
    base: Vocabulary
    proxy: Proxy
    pins: dict[int, tuple[int, ...]]


def load_scenario(path: str, state_cap: int = DEFAULT_STATE_CAP, vocab_cap: int = DEFAULT_VOCAB_CAP
                  ) -> Scenario:
    data = read_json(path)
    base = parse_universe(_field(data, "universe", path), f"{path}: universe", state_cap, vocab_cap)
    lower = no_abstraction_language(base.universe)
    layers = []
    for i, layer in enumerate(_list(_field(data, "layers", path), f"{path}: layers")):
        layers.append(UninstantiatedTask(parse_task(layer, lower, f"{path}: layers[{i}]"), i))
    try:
        stack = McaStack(tuple(layers))
    except ValueError as exc:
        raise ConfigError(f"{path}: layers: {exc}") from None
    proxy_text = data.get("proxy", "weakness") if isinstance(data, dict) else "weakness"
    try:
        proxy = Proxy.parse(proxy_text)
    except (ValueError, TypeError, AttributeError):
        raise ConfigError(f"{path}: proxy: unknown proxy {proxy_text!r}") from None
    pins_raw = data.get("pins", {}) if isinstance(data, dict) else {}
    if not isinstance(pins_raw, dict):
        raise ConfigError(f"{path}: pins: expected an object mapping level to statement")
    pins: dict[int, tuple[int, ...]] = {}
    for key, value in pins_raw.items():
        if not str(key).isdigit() or int(key) >= len(stack):
            raise ConfigError(f"{path}: pins.{key}: not a level of the stack")
        progs = _list(value, f"{path}: pins.{key}")
        try:
            pins[int(key)] = tuple(sorted(base.universe.parse_program(p) for p in progs))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{path}: pins.{key}: {exc}") from None
    return Scenario(stack, base, proxy, pins)


def load_collective(path: str, state_cap: int = DEFAULT_STATE_CAP, vocab_cap: int = DEFAULT_VOCAB_CAP
                    ) -> Collective:
    data = read_json(path)
    vocab = parse_universe(_field(data, "universe", path), f"{path}: universe", state_cap, vocab_cap)
    lang = language_for(vocab)
    parts = [parse_task(p, lang, f"{path}: parts[{i}]")
             for i, p in enumerate(_list(_field(data, "parts", path), f"{path}: parts"))]
    if not parts:
        raise ConfigError(f"{path}: parts: a collective needs at least one part")
    return Collective.of(parts)
