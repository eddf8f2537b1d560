"""Tasks over one language, correct policies, inference, learning and generalisation.

A :class:`Task` stores its inputs and correct outputs as ordinal masks of its
:class:`~enactive.universe.Language`; the ``inputs``/``outputs`` properties
give the statement sets.  Probabilities are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    EmptyInputsError,
    EmptyOutputsError,
    ForeignStatementError,
    IncorrectPolicyError,
    InvalidStatementError,
    NoOutputError,
    NoParentError,
    OutputsNotInExtensionError,
    UndefinedUtilityError,
    UnlearnableError,
    VocabularyMismatchError,
)
from .universe import Language, Statement, cache_enabled, iter_bits

Policy = Statement

LEVEL_INPUT_CAP = 20
ORACLE_CLASS_CAP = 22
COUNT_LANGUAGE_CAP = 20


@dataclass(frozen=True)
class Task:
    """A pair of input statements and correct-output statements."""

    lang: Language = field(repr=False)
    input_bits: int
    output_bits: int

    @property
    def inputs(self) -> frozenset[Statement]:
        return self.lang.statements_of(self.input_bits)

    @property
    def outputs(self) -> frozenset[Statement]:
        """The correct outputs."""
        return self.lang.statements_of(self.output_bits)

    @cached_property
    def available_bits(self) -> int:
        """Ordinal mask of every output available given the inputs."""
        return self.lang.ext_of_bits(self.input_bits)

    def describe(self) -> str:
        fmt = self.lang.vocab.format_statement
        ins = ",".join(fmt(s) for s in self.lang.sorted_statements(self.input_bits))
        outs = ",".join(fmt(s) for s in self.lang.sorted_statements(self.output_bits))
        return f"<{{{ins}}},{{{outs}}}>"

    def to_json(self) -> dict:
        fmt = self.lang.vocab.format_statement
        return {
            "inputs": [fmt(s) for s in self.lang.sorted_statements(self.input_bits)],
            "outputs": [fmt(s) for s in self.lang.sorted_statements(self.output_bits)],
        }


def _statement_bits(xs: Iterable[Statement], lang: Language, role: str) -> int:
    bits = 0
    for x in xs:
        try:
            bits |= 1 << lang.ordinal(x)
        except InvalidStatementError:
            raise ForeignStatementError(
                f"{role} {lang.vocab.format_statement(x)} is not a statement of the language"
            ) from None
    return bits


def task_from_bits(lang: Language, input_bits: int, output_bits: int) -> Task:
    """Validate ordinal masks and build the task."""
    if not input_bits:
        raise EmptyInputsError("a task needs at least one input")
    if not output_bits:
        raise EmptyOutputsError("a task needs at least one correct output")
    if input_bits > lang.full_bits or output_bits > lang.full_bits:
        raise ForeignStatementError("ordinal mask exceeds the language")
    stray = output_bits & ~lang.ext_of_bits(input_bits)
    if stray:
        bad = tuple(lang.sorted_statements(stray))
        names = ", ".join(lang.vocab.format_statement(s) for s in bad)
        raise OutputsNotInExtensionError(f"correct outputs not completing any input: {names}", bad)
    return Task(lang, input_bits, output_bits)


def make_task(inputs: Iterable[Statement], outputs: Iterable[Statement], lang: Language) -> Task:
    return task_from_bits(
        lang, _statement_bits(inputs, lang, "input"), _statement_bits(outputs, lang, "output")
    )


def outputs(task: Task) -> frozenset[Statement]:
    """Every completion of some input (the outputs available to the task)."""
    return task.lang.statements_of(task.available_bits)


def correct_bits(table: Sequence[int], available: int, wanted: int) -> int:
    """Ordinal mask of policies whose completions meet ``available`` exactly in ``wanted``."""
    bits = 0
    for k, e in enumerate(table):
        if e & available == wanted:
            bits |= 1 << k
    return bits


def correct_policy_bits(task: Task) -> int:
    return correct_bits(task.lang.ext_table(), task.available_bits, task.output_bits)


def correct_policies(task: Task) -> frozenset[Policy]:
    return task.lang.statements_of(correct_policy_bits(task))


def is_correct(policy: Policy, task: Task) -> bool:
    lang = task.lang
    return lang.ext_bits(lang.ordinal(policy)) & task.available_bits == task.output_bits


def _same_language(*tasks: Task) -> Language:
    lang = tasks[0].lang
    for t in tasks[1:]:
        if t.lang != lang:
            raise VocabularyMismatchError("tasks belong to different vocabularies")
    return lang


def is_parent(alpha: Task, omega: Task) -> bool:
    """True iff ``alpha`` is a child of ``omega`` (inputs grow strictly, outputs weakly)."""
    _same_language(alpha, omega)
    a, w = alpha.input_bits, omega.input_bits
    return a & w == a and a != w and alpha.output_bits & omega.output_bits == alpha.output_bits


def is_child_or_equal(alpha: Task, omega: Task) -> bool:
    _same_language(alpha, omega)
    return (
        alpha.input_bits & omega.input_bits == alpha.input_bits
        and alpha.output_bits & omega.output_bits == alpha.output_bits
    )


def task_level(task: Task, cap: int = LEVEL_INPUT_CAP) -> int:
    """Length of the longest chain of strict children below ``task``.

    Dropping a single input and keeping every surviving correct output is
    always at least as good as any other child, so the search only walks
    single-input removals (memoised over input masks).
    """
    n_inputs = task.input_bits.bit_count()
    if n_inputs > cap:
        raise CapacityError("task inputs", n_inputs, cap)
    lang = task.lang
    memo: dict[int, int] = {}

    def level(ins: int, outs: int) -> int:
        if ins in memo:
            return memo[ins]
        best = 0
        for k in iter_bits(ins):
            sub = ins & ~(1 << k)
            if not sub:
                continue
            sub_outs = outs & lang.ext_of_bits(sub)
            if sub_outs:
                best = max(best, 1 + level(sub, sub_outs))
        memo[ins] = best
        return best

    return level(task.input_bits, task.output_bits)


def merge(parts: Sequence[Task]) -> Task:
    """The collective task: union of inputs and union of correct outputs."""
    if not parts:
        raise ValueError("merge needs at least one part")
    lang = _same_language(*parts)
    ins = outs = 0
    for t in parts:
        ins |= t.input_bits
        outs |= t.output_bits
    return Task(lang, ins, outs)


@dataclass(frozen=True)
class Inference:
    output: Statement
    complete: bool


def infer(
    policy: Policy,
    input: Statement,
    task: Task,
    tie_break: str = "canonical",
    rng: np.random.Generator | int | None = None,
) -> Inference:
    """Pick a completion of ``input`` that ``policy`` admits.

    ``tie_break="canonical"`` returns the first candidate in canonical order;
    ``"seeded"`` draws one with ``rng`` (a Generator or an integer seed).
    """
    lang = task.lang
    k = lang.ordinal(input)
    if not task.input_bits >> k & 1:
        raise InvalidStatementError(f"{lang.vocab.format_statement(input)} is not an input of the task")
    candidates = lang.ext_bits(k) & lang.ext_bits(lang.ordinal(policy))
    if not candidates:
        raise NoOutputError(
            f"policy {lang.vocab.format_statement(policy)} admits no completion of "
            f"{lang.vocab.format_statement(input)}"
        )
    if tie_break == "canonical":
        pick = (candidates & -candidates).bit_length() - 1
    elif tie_break == "seeded":
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        options = list(iter_bits(candidates))
        pick = options[int(gen.integers(len(options)))]
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    return Inference(lang.at(pick), bool(task.output_bits >> pick & 1))


PROXY_KINDS = ("weakness", "simplicity", "random")


@dataclass(frozen=True)
class Proxy:
    """A preference over statements: higher score is preferred.

    Learning breaks score ties by canonical order (first wins).  The strict
    relation used by :func:`proxy_efficiency` compares scores only.
    """

    kind: str
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in PROXY_KINDS:
            raise ValueError(f"unknown proxy {self.kind!r}; expected one of {', '.join(PROXY_KINDS)}")

    @classmethod
    def parse(cls, text: str) -> Proxy:
        """Accepts ``weakness``, ``simplicity``, ``random`` or ``random:SEED``."""
        kind, _, seed = text.partition(":")
        return cls(kind, int(seed) if seed else 0)

    @property
    def name(self) -> str:
        return f"random:{self.seed}" if self.kind == "random" else self.kind

    def score(self, lang: Language, k: int) -> int:
        if self.kind == "weakness":
            return lang.ext_bits(k).bit_count()
        if self.kind == "simplicity":
            return -lang.at(k).members.bit_count()
        progs = lang.vocab.programs_of(lang.at(k))
        key = f"{self.seed}|{lang.vocab.universe.state_count}|{','.join(map(str, progs))}"
        return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big")

    def scores(self, lang: Language) -> list[int]:
        return [self.score(lang, k) for k in range(len(lang))]


WEAKNESS = Proxy("weakness")
SIMPLICITY = Proxy("simplicity")


def best_bits(lang: Language, candidates: int, proxy: Proxy) -> int:
    """Ordinal mask of the proxy-maximal candidates (all ties)."""
    best = None
    out = 0
    for k in iter_bits(candidates):
        s = proxy.score(lang, k)
        if best is None or s > best:
            best, out = s, 1 << k
        elif s == best:
            out |= 1 << k
    return out


def learn_ordinal(lang: Language, candidates: int, proxy: Proxy) -> int:
    ties = best_bits(lang, candidates, proxy)
    return (ties & -ties).bit_length() - 1


def learn(task: Task, proxy: Proxy = WEAKNESS) -> Policy:
    """The proxy-maximal correct policy, ties broken canonically."""
    pis = correct_policy_bits(task)
    if not pis:
        raise UnlearnableError(f"task {task.describe()} has no correct policy")
    return task.lang.at(learn_ordinal(task.lang, pis, proxy))


def generalizes(policy: Policy, omega: Task) -> bool:
    return is_correct(policy, omega)


def _require_correct(alpha: Task, policy: Policy) -> int:
    k = alpha.lang.ordinal(policy)
    if alpha.lang.ext_bits(k) & alpha.available_bits != alpha.output_bits:
        raise IncorrectPolicyError(
            f"policy {alpha.lang.vocab.format_statement(policy)} is not correct for {alpha.describe()}"
        )
    return k


def policy_task(alpha: Task, policy: Policy, responsive_only: bool = False) -> Task:
    """The highest-level task whose correct outputs are exactly the policy's completions.

    Every input set whose outputs cover the completions qualifies, so the
    maximum takes the whole language as inputs.  ``responsive_only`` keeps
    just the inputs the policy can answer (non-empty shared completions).
    """
    lang = alpha.lang
    k = _require_correct(alpha, policy)
    ext_pi = lang.ext_bits(k)
    if responsive_only:
        table = lang.ext_table()
        ins = 0
        for j, e in enumerate(table):
            if e & ext_pi:
                ins |= 1 << j
    else:
        ins = lang.full_bits
    return Task(lang, ins, ext_pi)


@dataclass(frozen=True)
class GeneralizationReport:
    policy: Policy
    closed_form: Fraction
    oracle: Fraction
    parent_class_count: int
    generalizing_class_count: int
    unwitnessed_class_count: int = 0

    @property
    def equal(self) -> bool:
        return self.closed_form == self.oracle

    def to_json(self, lang: Language) -> dict:
        return {
            "policy": lang.vocab.format_statement(self.policy),
            "closed_form": {"numerator": str(self.closed_form.numerator),
                            "denominator": str(self.closed_form.denominator)},
            "oracle": {"numerator": str(self.oracle.numerator),
                       "denominator": str(self.oracle.denominator)},
            "parent_class_count": self.parent_class_count,
            "generalizing_class_count": self.generalizing_class_count,
            "unwitnessed_class_count": self.unwitnessed_class_count,
            "equal": self.equal,
        }


def generalization_probability_closed(alpha: Task, policy: Policy) -> Fraction:
    """2^|Ē ∩ E_π| / 2^|Ē| where Ē is every statement outside the task's outputs."""
    k = _require_correct(alpha, policy)
    outside = alpha.lang.full_bits & ~alpha.available_bits
    return Fraction(1 << (outside & alpha.lang.ext_bits(k)).bit_count(), 1 << outside.bit_count())


def _is_valid_parent(lang: Language, alpha: Task, ins: int, outs: int) -> bool:
    return (
        ins & alpha.input_bits == alpha.input_bits
        and ins != alpha.input_bits
        and outs != 0
        and outs & ~lang.ext_of_bits(ins) == 0
    )


def _oracle_by_classes(alpha: Task, k: int) -> tuple[int, int, int]:
    """Walk every class label S ⊆ Ē, build witnesses, and verify them."""
    lang = alpha.lang
    table = lang.ext_table()
    ext_pi = table[k]
    outside = lang.full_bits & ~alpha.available_bits
    if outside.bit_count() > ORACLE_CLASS_CAP:
        raise CapacityError("statements outside the task's outputs", outside.bit_count(), ORACLE_CLASS_CAP)
    first_free = lang.full_bits & ~alpha.input_bits
    first_free &= -first_free
    total = generalizing = unwitnessed = 0
    s = outside
    while True:
        wanted = alpha.output_bits | s
        # any valid parent with these correct outputs makes the class real
        witness = alpha.input_bits | (s if s else first_free)
        if _is_valid_parent(lang, alpha, witness, wanted):
            total += 1
            # largest input set whose admitted completions stay inside the class label
            widest = alpha.input_bits
            for j, e in enumerate(table):
                if e & ext_pi & ~wanted == 0:
                    widest |= 1 << j
            if (
                _is_valid_parent(lang, alpha, widest, wanted)
                and lang.ext_of_bits(widest) & ext_pi == wanted
            ):
                generalizing += 1
        else:
            unwitnessed += 1
        if s == 0:
            break
        s = (s - 1) & outside
    return total, generalizing, unwitnessed


def _oracle_by_parents(alpha: Task, k: int) -> tuple[int, int, int]:
    """Collect the distinct correct-output sets of parents the policy solves.

    A parent adds a nonempty set of extra inputs; the policy then determines
    its correct outputs, so the distinct output sets are the OR-closure of what
    each extra input contributes.
    """
    lang = alpha.lang
    table = lang.ext_table()
    ext_pi = table[k]
    known = alpha.available_bits
    extra = lang.full_bits & ~alpha.input_bits
    if not extra:
        return 0, 0, 0
    reach: set[int] = set()
    for g in {table[j] & ext_pi & ~known for j in iter_bits(extra)}:
        reach |= {r | g for r in reach}
        reach.add(g)
    classes = 1 << (lang.ext_of_bits(extra) & ~known).bit_count()
    return classes, len(reach), 0


def generalization_report(alpha: Task, policy: Policy, method: str = "classes") -> GeneralizationReport:
    closed = generalization_probability_closed(alpha, policy)
    k = alpha.lang.ordinal(policy)
    if method == "classes":
        total, gen, unwitnessed = _oracle_by_classes(alpha, k)
    elif method == "parents":
        total, gen, unwitnessed = _oracle_by_parents(alpha, k)
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    if total == 0:
        raise NoParentError(f"task {alpha.describe()} has no parent")
    return GeneralizationReport(policy, closed, Fraction(gen, total), total, gen, unwitnessed)


def generalization_probability_oracle(alpha: Task, policy: Policy, method: str = "classes") -> Fraction:
    """Fraction of non-equivalent parents (grouped by correct outputs) the policy generalises to.

    Only parents that agree with ``alpha`` on its own available outputs are
    counted, since no policy correct for ``alpha`` can solve any other.
    """
    _require_correct(alpha, policy)
    return generalization_report(alpha, policy, method).oracle


@dataclass(frozen=True)
class NecessityRow:
    policy: Policy
    weakness: int
    parent_output_count: int
    generalizes: bool

    @property
    def violation(self) -> bool:
        return self.generalizes and self.weakness < self.parent_output_count


@dataclass(frozen=True)
class NecessityReport:
    rows: tuple[NecessityRow, ...]

    @property
    def violations(self) -> tuple[NecessityRow, ...]:
        return tuple(r for r in self.rows if r.violation)


def necessity_check(alpha: Task, omega: Task) -> NecessityReport:
    """For each correct policy of the child, compare its weakness with the parent's outputs."""
    if not is_parent(alpha, omega):
        raise ValueError("necessity_check needs alpha to be a child of omega")
    lang = alpha.lang
    n_out = omega.output_bits.bit_count()
    rows = []
    for k in iter_bits(correct_policy_bits(alpha)):
        e = lang.ext_bits(k)
        rows.append(NecessityRow(lang.at(k), e.bit_count(), n_out,
                                 e & omega.available_bits == omega.output_bits))
    return NecessityReport(tuple(rows))


def input_extension_table(lang: Language) -> np.ndarray:
    """Extension of every input set, indexed by the input set's ordinal mask."""
    n = len(lang)
    if n > COUNT_LANGUAGE_CAP:
        raise CapacityError("language", n, COUNT_LANGUAGE_CAP)
    dtype = np.uint32 if n <= 32 else np.uint64
    table = np.zeros(1, dtype=dtype)
    for e in lang.ext_table():
        table = np.concatenate([table, table | dtype(e)])
    return table


def generalization_counts(lang: Language) -> list[int]:
    """For each statement, how many tasks of the language it is correct for.

    For a fixed input set exactly one set of correct outputs works (the
    policy's share of the available outputs), so this counts the input sets
    with a nonempty share.
    """
    if cache_enabled():
        cached = getattr(lang, "_generalization_counts", None)
        if cached is not None:
            return list(cached)
    table = input_extension_table(lang)[1:]
    counts = [int(np.count_nonzero(table & table.dtype.type(e))) for e in lang.ext_table()]
    if cache_enabled():
        lang._generalization_counts = tuple(counts)  # type: ignore[attr-defined]
    return counts


def proxy_efficiency(a: Proxy, b: Proxy, lang: Language) -> int:
    """Disagreements of ``a`` with the generalisation order minus those of ``b``.

    Negative means ``a`` tracks the probability of generalisation better.
    """
    g = np.array(generalization_counts(lang), dtype=np.int64)
    sa = np.array(a.scores(lang), dtype=object)
    sb = np.array(b.scores(lang), dtype=object)
    rel_g = g[:, None] < g[None, :]
    rel_a = (sa[:, None] < sa[None, :]).astype(bool)
    rel_b = (sb[:, None] < sb[None, :]).astype(bool)
    return int(np.count_nonzero(rel_g != rel_a)) - int(np.count_nonzero(rel_g != rel_b))


def utility(task: Task) -> int:
    """Largest weakness among correct policies, minus the number of correct outputs."""
    pis = correct_policy_bits(task)
    if not pis:
        raise UndefinedUtilityError(f"task {task.describe()} has no correct policy")
    lang = task.lang
    return max(lang.ext_bits(k).bit_count() for k in iter_bits(pis)) - task.output_bits.bit_count()
