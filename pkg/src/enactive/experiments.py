"""Seeded generators and the statistical harness.

Every trial draws from its own generator, ``PCG64`` seeded by
``SeedSequence(seed, spawn_key=(trial,))``, so trials are independent of
execution order.  All aggregates are exact rationals.

Two harnesses live here:

* :func:`compare_proxies` learns from sampled child tasks under several
  proxies and scores generalisation to the parent.
* :func:`validate_all` checks the closed-form generalisation probability
  against an exhaustive oracle, the weakness lower bound, vocabulary
  monotonicity and proxy efficiency, either over every small universe or over
  sampled ones.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapacityError,
    ConfigError,
    DegenerateUniverseError,
    RejectionBudgetExhausted,
    TaskValidationError,
)
from .mca import (
    UninstantiatedTask,
    check_utility_monotone,
    check_weakness_monotone,
    image_pairs,
    no_abstraction_language,
)
from .tasks import (
    COUNT_LANGUAGE_CAP,
    ORACLE_CLASS_CAP,
    SIMPLICITY,
    WEAKNESS,
    Proxy,
    Task,
    correct_policy_bits,
    generalization_report,
    input_extension_table,
    is_parent,
    learn_ordinal,
    proxy_efficiency,
    task_from_bits,
)
from .universe import (
    DEFAULT_STATE_CAP,
    DEFAULT_VOCAB_CAP,
    Language,
    Universe,
    Vocabulary,
    cache_enabled,
    iter_bits,
    language_for,
)

GENERATOR = "numpy.random.PCG64 via SeedSequence(seed, spawn_key=(trial,))"
MODES = ("exhaustive", "sampled")
OUTPUT_SAMPLERS = ("uniform", "planted")
EXHAUSTIVE_VOCAB_CAP = 4  # keeps every language within COUNT_LANGUAGE_CAP
MONOTONICITY_STATE_CAP = 3
DEFAULT_RANDOM_SEEDS = tuple(range(1, 11))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def fraction_json(x: Fraction | None) -> dict | None:
    if x is None:
        return None
    return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": f"{float(x):.12g}"}


# --------------------------------------------------------------------------- config


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    state_count: int = 3
    vocab_size: int = 4
    density: float = 0.5
    input_count: tuple[int, int] = (2, 4)
    output_rate: float = 0.3
    output_sampler: str = "uniform"
    trial_count: int = 100
    mode: str = "exhaustive"
    rejection_budget: int = 1000
    universe_retries: int = 100
    random_seeds: tuple[int, ...] = DEFAULT_RANDOM_SEEDS
    max_counterexamples: int = 50
    state_cap: int = DEFAULT_STATE_CAP
    vocab_cap: int = DEFAULT_VOCAB_CAP

    def __post_init__(self) -> None:
        def bad(name: str, why: str) -> ConfigError:
            return ConfigError(f"field {name!r}: {why} (got {getattr(self, name)!r})")

        for name in ("seed", "state_count", "vocab_size", "trial_count", "rejection_budget",
                     "universe_retries", "max_counterexamples", "state_cap", "vocab_cap"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise bad(name, "must be an integer")
        if not 0 <= self.seed < 2**64:
            raise bad("seed", "must be a 64-bit unsigned integer")
        for name in ("state_count", "vocab_size", "trial_count", "rejection_budget", "universe_retries"):
            if getattr(self, name) < 1:
                raise bad(name, "must be positive")
        if self.max_counterexamples < 0:
            raise bad("max_counterexamples", "must not be negative")
        for name in ("density", "output_rate"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                raise bad(name, "must be a number in [0, 1]")
        lo_hi = self.input_count
        if (len(lo_hi) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in lo_hi)
                or not 2 <= lo_hi[0] <= lo_hi[1]):
            raise bad("input_count", "must be [lo, hi] with 2 <= lo <= hi")
        if self.mode not in MODES:
            raise bad("mode", f"must be one of {', '.join(MODES)}")
        if self.output_sampler not in OUTPUT_SAMPLERS:
            raise bad("output_sampler", f"must be one of {', '.join(OUTPUT_SAMPLERS)}")
        if not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in self.random_seeds):
            raise bad("random_seeds", "must be non-negative integers")
        if self.state_count > self.state_cap:
            raise CapacityError("state_count", self.state_count, self.state_cap)
        if self.vocab_size > self.vocab_cap:
            raise CapacityError("vocab_size", self.vocab_size, self.vocab_cap)
        if self.mode == "sampled" and self.vocab_size > 2**self.state_count - 1:
            raise bad("vocab_size", f"exceeds the {2**self.state_count - 1} nonempty programs available")

    @classmethod
    def from_dict(cls, data: object, **overrides: object) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown field {unknown[0]!r}")
        merged = dict(data)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        for name in ("input_count", "random_seeds"):
            if name in merged:
                if not isinstance(merged[name], (list, tuple)):
                    raise ConfigError(f"field {name!r}: must be a list (got {merged[name]!r})")
                merged[name] = tuple(merged[name])
        return cls(**merged)

    @classmethod
    def load(cls, path: str, **overrides: object) -> ExperimentConfig:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        try:
            return cls.from_dict(data, **overrides)
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from None

    def to_json(self) -> dict:
        out = asdict(self)
        out["input_count"] = list(self.input_count)
        out["random_seeds"] = list(self.random_seeds)
        return out


# --------------------------------------------------------------------------- generators


def random_universe(config: ExperimentConfig, rng: np.random.Generator | None = None
                    ) -> tuple[Universe, Vocabulary, Language]:
    """Draw distinct nonempty programs, each state set with probability ``density``."""
    rng = trial_rng(config.seed, 0) if rng is None else rng
    universe = Universe(config.state_count, config.state_cap)
    weights = 1 << np.arange(config.state_count, dtype=np.int64)
    for _ in range(config.universe_retries):
        programs: set[int] = set()
        draws = 0
        while len(programs) < config.vocab_size and draws < 20 * config.vocab_size:
            draws += 1
            p = int((rng.random(config.state_count) < config.density) @ weights)
            if p:
                programs.add(p)
        if len(programs) < config.vocab_size:
            continue
        vocab = Vocabulary.of(universe, programs, cap=config.vocab_cap)
        lang = language_for(vocab)
        if len(lang) >= 3:
            return universe, vocab, lang
    raise DegenerateUniverseError(
        f"no usable vocabulary of {config.vocab_size} programs over {config.state_count} states "
        f"at density {config.density} after {config.universe_retries} attempts"
    )


def random_task_pair(lang: Language, config: ExperimentConfig, rng: np.random.Generator | None = None
                     ) -> tuple[Task, Task]:
    """A solvable parent and a child made by dropping some of its inputs.

    The parent's inputs are a uniform draw of the configured size.  With the
    ``uniform`` sampler its outputs are drawn uniformly from the output sets
    some policy can produce on those inputs, which is the uniform task
    distribution conditioned on having a correct policy.  The ``planted``
    sampler instead plants a statement whose members are kept independently
    with probability ``output_rate`` and uses its share of the outputs.  The
    child keeps a random nonempty proper subset of the inputs with the
    matching share of outputs.
    """
    rng = trial_rng(config.seed, 0) if rng is None else rng
    n = len(lang)
    lo, hi = config.input_count
    if n < 2:
        raise RejectionBudgetExhausted(f"language of {n} statements is too small for a child task")
    table = lang.ext_table()
    width = len(lang.vocab)
    weights = 1 << np.arange(width, dtype=np.int64)
    for _ in range(config.rejection_budget):
        k = min(int(rng.integers(lo, hi + 1)), n)
        chosen = rng.choice(n, size=k, replace=False)
        ins = 0
        for j in chosen:
            ins |= 1 << int(j)
        avail = lang.ext_of_bits(ins)
        if config.output_sampler == "uniform":
            options = sorted({e & avail for e in table} - {0})
            outs = options[int(rng.integers(len(options)))]
        else:
            planted = int((rng.random(width) < config.output_rate) @ weights)
            outs = avail & table[lang._index[planted]] if planted in lang._index else 0
        keep = rng.random(k) < 0.5
        sub = 0
        for j, kept in zip(chosen, keep):
            if kept:
                sub |= 1 << int(j)
        if not outs or sub in (0, ins):
            continue
        child_outs = outs & lang.ext_of_bits(sub)
        if not child_outs:
            continue
        omega = task_from_bits(lang, ins, outs)
        alpha = task_from_bits(lang, sub, child_outs)
        pa, pw = correct_policy_bits(alpha), correct_policy_bits(omega)
        if not is_parent(alpha, omega) or not pw or pw & ~pa:
            raise TaskValidationError(f"sampled pair violates the parent/child contract: {alpha.describe()}")
        return alpha, omega
    raise RejectionBudgetExhausted(f"no acceptable task pair within {config.rejection_budget} attempts")


# --------------------------------------------------------------------------- proxy comparison


@dataclass(frozen=True)
class ProxyStats:
    proxy: str
    trials: int
    successes: int
    weakness_total: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.successes, self.trials) if self.trials else Fraction(0)

    @property
    def mean_weakness(self) -> Fraction:
        return Fraction(self.weakness_total, self.trials) if self.trials else Fraction(0)

    def to_json(self) -> dict:
        return {
            "proxy": self.proxy,
            "trials": self.trials,
            "successes": self.successes,
            "rate": fraction_json(self.rate),
            "mean_weakness": fraction_json(self.mean_weakness),
        }


@dataclass(frozen=True)
class TrialRow:
    seed: int
    trial: int
    proxy: str
    policy: str
    weakness: int
    success: bool


@dataclass(frozen=True)
class ProxyComparison:
    config: ExperimentConfig
    stats: tuple[ProxyStats, ...]
    rows: tuple[TrialRow, ...]
    skipped: int
    singleton_trials: int

    def stat(self, name: str) -> ProxyStats:
        for s in self.stats:
            if s.proxy == name:
                return s
        raise KeyError(name)

    def ratio(self, a: str, b: str) -> Fraction | None:
        rb = self.stat(b).rate
        return self.stat(a).rate / rb if rb else None

    def to_json(self) -> dict:
        return {
            "generator": GENERATOR,
            "seed": self.config.seed,
            "config": self.config.to_json(),
            "skipped_trials": self.skipped,
            "singleton_trials": self.singleton_trials,
            "proxies": [s.to_json() for s in self.stats],
            "ratios": [
                {"numerator_proxy": a.proxy, "denominator_proxy": b.proxy,
                 "ratio": fraction_json(self.ratio(a.proxy, b.proxy))}
                for a in self.stats for b in self.stats if a is not b
            ],
        }

    csv_header = ("seed", "trial", "proxy", "policy", "weakness", "success")

    def csv_rows(self) -> Iterator[tuple]:
        for r in self.rows:
            yield (r.seed, r.trial, r.proxy, r.policy, r.weakness, "true" if r.success else "false")


def compare_proxies(config: ExperimentConfig, proxies: Sequence[Proxy]) -> ProxyComparison:
    """Learn each sampled child under every proxy and score generalisation to its parent."""
    if not proxies:
        raise ValueError("compare_proxies needs at least one proxy")
    names = [p.name for p in proxies]
    if len(set(names)) != len(names):
        raise ValueError("proxies must be distinct")
    successes = [0] * len(proxies)
    weakness = [0] * len(proxies)
    trials = skipped = singletons = 0
    rows: list[TrialRow] = []
    for t in range(config.trial_count):
        rng = trial_rng(config.seed, t)
        try:
            _, _, lang = random_universe(config, rng)
            alpha, omega = random_task_pair(lang, config, rng)
        except (DegenerateUniverseError, RejectionBudgetExhausted):
            skipped += 1
            continue
        trials += 1
        pis = correct_policy_bits(alpha)
        singletons += pis.bit_count() == 1
        for i, proxy in enumerate(proxies):
            k = learn_ordinal(lang, pis, proxy)
            e = lang.ext_bits(k)
            ok = e & omega.available_bits == omega.output_bits
            successes[i] += ok
            weakness[i] += e.bit_count()
            rows.append(TrialRow(config.seed, t, proxy.name, lang.vocab.format_statement(lang.at(k)),
                                 e.bit_count(), ok))
    stats = tuple(ProxyStats(p.name, trials, s, w) for p, s, w in zip(proxies, successes, weakness))
    return ProxyComparison(config, stats, tuple(rows), skipped, singletons)


def default_proxies(config: ExperimentConfig) -> list[Proxy]:
    return [WEAKNESS, SIMPLICITY, Proxy("random", config.seed)]


# --------------------------------------------------------------------------- exhaustive sweeps


def vocabularies_up_to_isomorphism(state_count: int, max_size: int, cap: int = DEFAULT_VOCAB_CAP
                                   ) -> list[Vocabulary]:
    """One representative per orbit of nonempty-program vocabularies under state relabelling."""
    universe = Universe(state_count)
    perms = list(permutations(range(state_count)))
    programs = universe.all_programs(include_empty=False)

    def relabel(perm: tuple[int, ...], p: int) -> int:
        return sum(1 << perm[s] for s in iter_bits(p))

    images = {p: [relabel(perm, p) for perm in perms] for p in programs}
    seen: set[tuple[int, ...]] = set()
    out = []
    for size in range(1, min(max_size, len(programs)) + 1):
        for combo in combinations(programs, size):
            canon = min(tuple(sorted(images[p][i] for p in combo)) for i in range(len(perms)))
            if canon not in seen:
                seen.add(canon)
                out.append(Vocabulary(universe, canon, cap))
    return out


def universe_id(vocab: Vocabulary) -> str:
    u = vocab.universe
    return f"{u.state_count}:" + ".".join(u.format_program(p) for p in vocab.programs)


def _statements_id(lang: Language, bits: int) -> str:
    return "+".join(lang.vocab.format_statement(s) for s in lang.sorted_statements(bits))


def task_id(task: Task) -> str:
    lang = task.lang
    return f"{universe_id(lang.vocab)}|{_statements_id(lang, task.input_bits)}|{_statements_id(lang, task.output_bits)}"


def _closure_size(gens: Iterable[int]) -> int:
    reach: set[int] = set()
    for g in set(gens):
        reach |= {r | g for r in reach}
        reach.add(g)
    return len(reach)


@dataclass
class GeneralizationTally:
    checked: int = 0
    equal: int = 0
    mismatched: int = 0
    skipped_no_parent: int = 0
    skipped_capacity: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"checked": self.checked, "equal": self.equal, "mismatched": self.mismatched,
                "skipped_no_parent": self.skipped_no_parent, "skipped_capacity": self.skipped_capacity,
                "counterexamples": self.counterexamples}


@dataclass
class NecessityTally:
    checked: int = 0
    violations: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"checked": self.checked, "violations": self.violations,
                "counterexamples": self.counterexamples}


@dataclass
class EfficiencyTally:
    languages: int = 0
    skipped_capacity: int = 0
    comparisons: int = 0
    failures: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"languages": self.languages, "skipped_capacity": self.skipped_capacity,
                "comparisons": self.comparisons, "failures": self.failures,
                "counterexamples": self.counterexamples}


@dataclass
class MonotonicityTally:
    """Vocabulary monotonicity over one universe size."""

    state_count: int
    task_family: str
    a_checked: int = 0
    a_violations: int = 0
    a_equalities: int = 0
    a_skipped: int = 0
    b_checked: int = 0
    b_violations: int = 0
    examples: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"state_count": self.state_count, "task_family": self.task_family,
                "a_checked": self.a_checked, "a_violations": self.a_violations,
                "a_equalities": self.a_equalities, "a_skipped": self.a_skipped,
                "b_checked": self.b_checked, "b_violations": self.b_violations,
                "examples": self.examples}


RowSink = Callable[[tuple], None]
GENERALIZATION_CSV_HEADER = ("alpha_id", "pi", "closed", "oracle", "equal")


def _frac_str(num: int, den: int) -> str:
    f = Fraction(num, den)
    return f"{f.numerator}/{f.denominator}"


def sweep_generalization(lang: Language, tally: GeneralizationTally, necessity: NecessityTally,
                         limit: int, sink: RowSink | None = None) -> None:
    """Every task of ``lang`` and every correct policy: closed form vs oracle, and the weakness bound.

    For inputs I and statement k the task is ⟨I, E_k ∩ E_I⟩, so iterating over
    (I, k) visits each pair (task, correct policy) once.  The oracle counts
    the distinct output sets of consistent parents the policy solves: the
    OR-closure of ``E_j ∩ E_k`` over extra inputs j.  Extra inputs already
    inside E_I contribute nothing, so the closure is memoised on
    (E_I, k, whether such an input exists).
    """
    table = lang.ext_table()
    n = len(lang)
    full = lang.full_bits
    avail_of = input_extension_table(lang)
    memo: dict[tuple[int, int, bool], int] = {}
    use_memo = cache_enabled()
    uid = universe_id(lang.vocab) if sink is not None or limit else ""
    for ins in range(1, full + 1):
        avail = int(avail_of[ins])
        outside = full & ~avail
        extra = full & ~ins
        inside_extra = bool(extra & avail)
        denom_exp = outside.bit_count()
        for k in range(n):
            ek = table[k]
            outs = ek & avail
            if not outs:
                continue
            necessity.checked += 1
            if ek.bit_count() < outs.bit_count():
                necessity.violations += 1
                if len(necessity.counterexamples) < limit:
                    necessity.counterexamples.append(
                        {"task": f"{uid}|{_statements_id(lang, ins)}|{_statements_id(lang, outs)}",
                         "policy": lang.vocab.format_statement(lang.at(k))})
            if not extra:
                tally.skipped_no_parent += 1
                continue
            key = (avail, k, inside_extra)
            reach = memo.get(key) if use_memo else None
            if reach is None:
                gens = [table[j] & ek & outside for j in iter_bits(outside)]
                if inside_extra:
                    gens.append(0)
                reach = _closure_size(gens)
                if use_memo:
                    memo[key] = reach
            classes_exp = (lang.ext_of_bits(extra) & outside).bit_count()
            closed_exp = (outside & ek).bit_count()
            # closed = 2^closed_exp / 2^denom_exp, oracle = reach / 2^classes_exp
            same = (reach << denom_exp) == (1 << (closed_exp + classes_exp))
            tally.checked += 1
            if same:
                tally.equal += 1
            else:
                tally.mismatched += 1
            if sink is not None or (not same and len(tally.counterexamples) < limit):
                aid = f"{uid}|{_statements_id(lang, ins)}|{_statements_id(lang, outs)}"
                pi = lang.vocab.format_statement(lang.at(k))
                closed = _frac_str(1 << closed_exp, 1 << denom_exp)
                oracle = _frac_str(reach, 1 << classes_exp)
                if sink is not None:
                    sink((aid, pi, closed, oracle, "true" if same else "false"))
                if not same and len(tally.counterexamples) < limit:
                    tally.counterexamples.append({
                        "alpha_id": aid,
                        "universe": lang.vocab.to_json(),
                        "task": task_from_bits(lang, ins, outs).to_json(),
                        "policy": pi,
                        "closed": closed,
                        "oracle": oracle,
                    })


def sweep_efficiency(lang: Language, seeds: Sequence[int], tally: EfficiencyTally, limit: int) -> None:
    if len(lang) > COUNT_LANGUAGE_CAP:
        tally.skipped_capacity += 1
        return
    tally.languages += 1
    for other in [SIMPLICITY] + [Proxy("random", s) for s in seeds]:
        tally.comparisons += 1
        value = proxy_efficiency(WEAKNESS, other, lang)
        if value > 0:
            tally.failures += 1
            if len(tally.counterexamples) < limit:
                tally.counterexamples.append({"universe": lang.vocab.to_json(), "baseline": other.name,
                                              "efficiency": value})


def _all_vocabularies(universe: Universe) -> list[Vocabulary]:
    programs = universe.all_programs(include_empty=False)
    return [Vocabulary(universe, combo, cap=64)
            for size in range(1, len(programs) + 1) for combo in combinations(programs, size)]


def monotonicity_tasks(universe: Universe) -> tuple[str, list[UninstantiatedTask]]:
    """Solvable no-abstraction tasks used for the utility sweep.

    Two-state universes use every solvable task; larger ones only the
    single-input tasks, which keeps the three-state sweep to a few seconds.
    """
    lang = no_abstraction_language(universe)
    table = lang.ext_table()
    family = "all" if universe.state_count <= 2 else "single-input"
    input_sets = range(1, lang.full_bits + 1) if family == "all" else (1 << j for j in range(len(lang)))
    tasks: list[UninstantiatedTask] = []
    for ins in input_sets:
        avail = lang.ext_of_bits(ins)
        seen = set()
        for e in table:
            outs = e & avail
            if outs and outs not in seen:
                seen.add(outs)
                tasks.append(UninstantiatedTask(Task(lang, ins, outs)))
    return family, tasks


def sweep_monotonicity(state_count: int, limit: int) -> MonotonicityTally:
    universe = Universe(state_count)
    family, lams = monotonicity_tasks(universe)
    tally = MonotonicityTally(state_count, family)
    vocabs = _all_vocabularies(universe)
    pairs = [(a, b) for b in vocabs for a in vocabs
             if a != b and set(a.programs) <= set(b.programs)]
    cache: dict = {}
    for lam in lams:
        rep = check_utility_monotone(lam, pairs, cache)
        tally.a_checked += rep.a_checked
        tally.a_violations += len(rep.a_violations)
        tally.a_equalities += len(rep.a_equalities)
        tally.a_skipped += len(rep.a_skipped)
        for small, big, ua, ub in rep.a_violations:
            if len(tally.examples) < limit:
                tally.examples.append({"part": "a", "rho": lam.rho.to_json(),
                                       "small": small.to_json()["vocabulary"], "big": big.to_json()["vocabulary"],
                                       "utility_small": ua, "utility_big": ub})
    lower = no_abstraction_language(universe)
    rep = check_weakness_monotone(lower, image_pairs(lower))
    tally.b_checked = rep.b_checked
    tally.b_violations = len(rep.b_violations)
    fmt = lower.vocab.format_statement
    for pa, pb, wa, wb in rep.b_violations[: max(0, limit - len(tally.examples))]:
        tally.examples.append({"part": "b", "policy_small": fmt(pa), "policy_big": fmt(pb),
                               "weakness_small": wa, "weakness_big": wb})
    return tally


# --------------------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    config: ExperimentConfig
    universes: int = 0
    skipped_trials: int = 0
    generalization: GeneralizationTally = field(default_factory=GeneralizationTally)
    necessity: NecessityTally = field(default_factory=NecessityTally)
    monotonicity: list[MonotonicityTally] = field(default_factory=list)
    efficiency: EfficiencyTally = field(default_factory=EfficiencyTally)

    @property
    def passed(self) -> bool:
        return (
            self.generalization.mismatched == 0
            and self.necessity.violations == 0
            and all(m.a_violations == 0 and m.b_violations == 0 for m in self.monotonicity)
            and self.efficiency.failures == 0
        )

    def to_json(self) -> dict:
        return {
            "generator": GENERATOR,
            "seed": self.config.seed,
            "config": self.config.to_json(),
            "universes": self.universes,
            "skipped_trials": self.skipped_trials,
            "generalization": self.generalization.to_json(),
            "necessity": self.necessity.to_json(),
            "monotonicity": [m.to_json() for m in self.monotonicity],
            "efficiency": self.efficiency.to_json(),
            "passed": self.passed,
        }


def _check_sampled_pair(alpha: Task, omega: Task, report: ValidationReport, limit: int) -> None:
    lang = alpha.lang
    g, nec = report.generalization, report.necessity
    for k in iter_bits(correct_policy_bits(alpha)):
        policy = lang.at(k)
        outside = lang.full_bits & ~alpha.available_bits
        if (outside & lang.ext_bits(k)).bit_count() > ORACLE_CLASS_CAP:
            g.skipped_capacity += 1
            continue
        rep = generalization_report(alpha, policy, method="parents")
        g.checked += 1
        if rep.equal:
            g.equal += 1
        else:
            g.mismatched += 1
            if len(g.counterexamples) < limit:
                g.counterexamples.append({
                    "alpha_id": task_id(alpha), "universe": lang.vocab.to_json(), "task": alpha.to_json(),
                    "policy": lang.vocab.format_statement(policy),
                    "closed": fraction_json(rep.closed_form)["fraction"],
                    "oracle": fraction_json(rep.oracle)["fraction"],
                })
    n_out = omega.output_bits.bit_count()
    for k in iter_bits(correct_policy_bits(omega)):
        nec.checked += 1
        if lang.ext_bits(k).bit_count() < n_out:
            nec.violations += 1
            if len(nec.counterexamples) < limit:
                nec.counterexamples.append({"task": task_id(omega),
                                            "policy": lang.vocab.format_statement(lang.at(k))})


def validate_all(config: ExperimentConfig, sink: RowSink | None = None) -> ValidationReport:
    """Run every check and collect counts plus serialised counterexamples.

    Exhaustive mode walks every vocabulary up to state relabelling with at
    most ``state_count`` states and ``vocab_size`` programs; the utility and
    weakness monotonicity sweeps cover universes of 2 to 3 states.  Sampled
    mode draws ``trial_count`` universes and task pairs instead.  ``sink``
    receives one row per (task, correct policy) in exhaustive mode.
    """
    report = ValidationReport(config)
    limit = config.max_counterexamples
    if config.mode == "exhaustive":
        if config.vocab_size > EXHAUSTIVE_VOCAB_CAP:
            raise CapacityError("vocab_size for exhaustive validation", config.vocab_size, EXHAUSTIVE_VOCAB_CAP)
        for n in range(1, config.state_count + 1):
            for vocab in vocabularies_up_to_isomorphism(n, config.vocab_size, config.vocab_cap):
                lang = language_for(vocab)
                report.universes += 1
                sweep_generalization(lang, report.generalization, report.necessity, limit, sink)
                sweep_efficiency(lang, config.random_seeds, report.efficiency, limit)
        for n in range(2, min(config.state_count, MONOTONICITY_STATE_CAP) + 1):
            report.monotonicity.append(sweep_monotonicity(n, limit))
        return report
    for t in range(config.trial_count):
        rng = trial_rng(config.seed, t)
        try:
            _, _, lang = random_universe(config, rng)
            alpha, omega = random_task_pair(lang, config, rng)
        except (DegenerateUniverseError, RejectionBudgetExhausted):
            report.skipped_trials += 1
            continue
        report.universes += 1
        _check_sampled_pair(alpha, omega, report, limit)
        sweep_efficiency(lang, config.random_seeds, report.efficiency, limit)
    return report
