"""Multiscale competency architectures: layered tasks, derived vocabularies and splintering.

An uninstantiated task wraps a task ``rho`` stated in the no-abstraction
vocabulary P (every program of a small universe).  Instantiating it in a
vocabulary keeps the inputs and correct outputs that vocabulary can express.
A stack is realised bottom-up: instantiate, learn a policy, turn the policy's
completions into the next layer's vocabulary, repeat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    CapacityError,
    IncorrectPolicyError,
    IrrecoverableCollectiveError,
    NotOverConstrainedError,
    StackError,
    UninstantiableError,
    VocabularyMismatchError,
)
from .tasks import (
    WEAKNESS,
    Policy,
    Proxy,
    Task,
    best_bits,
    correct_policy_bits,
    is_child_or_equal,
    is_parent,
    learn_ordinal,
    merge,
    task_from_bits,
    utility,
)
from .universe import (
    Language,
    Statement,
    Universe,
    Vocabulary,
    intersect,
    iter_bits,
    language_for,
)

P_STATE_CAP = 4
SPLINTER_EXHAUSTIVE_CAP = 16
MAXIMALITY_CAP = 12


def no_abstraction_language(universe: Universe) -> Language:
    if universe.state_count > P_STATE_CAP:
        raise CapacityError("universe for the no-abstraction vocabulary", universe.state_count, P_STATE_CAP)
    return language_for(Vocabulary.no_abstraction(universe))


@dataclass(frozen=True)
class UninstantiatedTask:
    rho: Task
    id: int = 0

    def __post_init__(self) -> None:
        vocab = self.rho.lang.vocab
        if vocab != Vocabulary.no_abstraction(vocab.universe):
            raise VocabularyMismatchError("an uninstantiated task must be stated over every program")
        if vocab.universe.state_count > P_STATE_CAP:
            raise CapacityError("universe", vocab.universe.state_count, P_STATE_CAP)

    @property
    def universe(self) -> Universe:
        return self.rho.lang.vocab.universe


def lift(task: Task, id: int = 0) -> UninstantiatedTask:
    """Restate a task of any vocabulary over P and wrap it."""
    src = task.lang
    target = no_abstraction_language(src.vocab.universe)

    def restate(bits: int) -> int:
        out = 0
        for x in src.sorted_statements(bits):
            y = target.restate(x, src.vocab)
            assert y is not None  # every program lives in P
            out |= 1 << target.ordinal(y)
        return out

    return UninstantiatedTask(Task(target, restate(task.input_bits), restate(task.output_bits)), id)


def derived_vocabulary(policy: Policy, lang: Language) -> Vocabulary:
    """The programs realised by the completions of ``policy``."""
    programs = {intersect(lang.at(k), lang.vocab) for k in iter_bits(lang.ext_bits(lang.ordinal(policy)))}
    return Vocabulary.of(lang.vocab.universe, programs, cap=max(lang.vocab.cap, len(programs)))


def _restate_bits(bits: int, src: Language, target: Language) -> int:
    out = 0
    for x in src.sorted_statements(bits):
        y = target.restate(x, src.vocab)
        if y is not None:
            out |= 1 << target.ordinal(y)
    return out


def instantiate(lam: UninstantiatedTask, vocab: Vocabulary) -> Task:
    """The greatest child-or-equal of ``lam.rho`` expressible in ``vocab``."""
    src = lam.rho.lang
    if vocab.universe != src.vocab.universe:
        raise VocabularyMismatchError("vocabulary belongs to a different universe")
    target = language_for(vocab)
    ins = _restate_bits(lam.rho.input_bits, src, target)
    if not ins:
        raise UninstantiableError("no input survives the restriction", cause="no-inputs")
    outs = _restate_bits(lam.rho.output_bits, src, target) & target.ext_of_bits(ins)
    if not outs:
        raise UninstantiableError("no correct output survives the restriction", cause="no-outputs")
    return Task(target, ins, outs)


def maximal_alternatives(lam: UninstantiatedTask, vocab: Vocabulary) -> list[Task]:
    """Maximal ``vocab``-children of ``lam.rho`` other than :func:`instantiate`'s answer.

    Brute force over every candidate task; an empty list confirms the
    restriction is the unique highest-level child.
    """
    src = lam.rho.lang
    target = language_for(vocab)
    ins_all = _restate_bits(lam.rho.input_bits, src, target)
    outs_all = _restate_bits(lam.rho.output_bits, src, target)
    n = ins_all.bit_count() + outs_all.bit_count()
    if n > MAXIMALITY_CAP:
        raise CapacityError("restricted task", n, MAXIMALITY_CAP)
    candidates: list[Task] = []
    ins = ins_all
    while ins:
        avail = target.ext_of_bits(ins)
        outs = outs_all & avail
        o = outs
        while o:
            candidates.append(task_from_bits(target, ins, o))
            o = (o - 1) & outs
        ins = (ins - 1) & ins_all
    maximal = [
        t for t in candidates
        if not any(u != t and is_child_or_equal(t, u) for u in candidates)
    ]
    try:
        best = instantiate(lam, vocab)
    except UninstantiableError:
        return maximal
    return [t for t in maximal if t != best]


@dataclass(frozen=True)
class McaStack:
    """Uninstantiated tasks, lowest layer first; each layer is a strict child of the one below."""

    layers: tuple[UninstantiatedTask, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise StackError("a stack needs at least one layer")
        universe = self.layers[0].universe
        for i, (lower, upper) in enumerate(zip(self.layers, self.layers[1:])):
            if upper.universe != universe:
                raise StackError(f"layer {i + 1} lives in a different universe")
            if not is_parent(upper.rho, lower.rho):
                raise StackError(f"layer {i + 1} is not a child of layer {i}")

    @classmethod
    def of(cls, tasks: Iterable[Task]) -> McaStack:
        return cls(tuple(lift(t, i) for i, t in enumerate(tasks)))

    def __len__(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class LevelRecord:
    level: int
    vocabulary: Vocabulary
    task: Task | None
    policy: Policy | None = None
    weakness: int | None = None
    utility: int | None = None
    correct_count: int = 0
    pinned: bool = False


@dataclass(frozen=True)
class McaState:
    """What a stack realises: one record per level reached.

    ``status`` is ``"complete"`` or ``"over_constrained"``; in the latter case
    ``level`` names the first level without a correct policy and ``cause``
    says whether the task was missing (``no-inputs``/``no-outputs``) or had
    no correct policy (``no-policy``).
    """

    records: tuple[LevelRecord, ...]
    status: str
    level: int | None = None
    cause: str | None = None
    proxy: str = "weakness"

    @property
    def vocabularies(self) -> tuple[Vocabulary, ...]:
        return tuple(r.vocabulary for r in self.records)

    @property
    def policies(self) -> tuple[Policy, ...]:
        return tuple(r.policy for r in self.records if r.policy is not None)

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    @property
    def is_mcl(self) -> bool:
        """Weak policy optimisation at every (unpinned) level of an under-constrained stack."""
        return self.complete and self.proxy == "weakness" and not any(r.pinned for r in self.records)

    def to_json(self) -> dict:
        levels = []
        for r in self.records:
            fmt = r.vocabulary.format_statement
            levels.append({
                "level": r.level,
                "vocabulary": [r.vocabulary.universe.format_program(p) for p in r.vocabulary],
                "vocabulary_size": len(r.vocabulary),
                "language_size": len(r.task.lang) if r.task is not None else None,
                "correct_policy_count": r.correct_count,
                "policy": fmt(r.policy) if r.policy is not None else None,
                "policy_programs": (
                    [r.vocabulary.universe.format_program(p) for p in r.vocabulary.programs_of(r.policy)]
                    if r.policy is not None else None
                ),
                "weakness": r.weakness,
                "utility": r.utility,
                "pinned": r.pinned,
            })
        return {
            "status": self.status,
            "over_constrained_level": self.level,
            "cause": self.cause,
            "proxy": self.proxy,
            "mcl": self.is_mcl,
            "levels": levels,
        }


def _pin_ordinal(pin: Statement | Sequence[int], lang: Language) -> int:
    if isinstance(pin, Statement):
        return lang.ordinal(pin)
    return lang.ordinal(lang.vocab.statement(pin))


def _realise(
    stack: McaStack,
    base_vocab: Vocabulary,
    proxy: Proxy,
    pins: Mapping[int, Statement | Sequence[int]],
    branch: bool,
) -> list[McaState]:
    results: list[McaState] = []

    def walk(i: int, vocab: Vocabulary, records: tuple[LevelRecord, ...]) -> None:
        if i == len(stack):
            results.append(McaState(records, "complete", proxy=proxy.name))
            return
        try:
            task = instantiate(stack.layers[i], vocab)
        except UninstantiableError as exc:
            rec = LevelRecord(i, vocab, None)
            results.append(McaState(records + (rec,), "over_constrained", i, exc.cause, proxy.name))
            return
        lang = task.lang
        pis = correct_policy_bits(task)
        if not pis:
            rec = LevelRecord(i, vocab, task)
            results.append(McaState(records + (rec,), "over_constrained", i, "no-policy", proxy.name))
            return
        eps = utility(task)
        if i in pins:
            k = _pin_ordinal(pins[i], lang)
            if not pis >> k & 1:
                raise IncorrectPolicyError(f"pinned policy at level {i} is not correct for its task")
            choices = [k]
        elif branch:
            choices = list(iter_bits(best_bits(lang, pis, proxy)))
        else:
            choices = [learn_ordinal(lang, pis, proxy)]
        for k in choices:
            policy = lang.at(k)
            rec = LevelRecord(i, vocab, task, policy, lang.ext_bits(k).bit_count(), eps,
                              pis.bit_count(), i in pins)
            walk(i + 1, derived_vocabulary(policy, lang), records + (rec,))

    walk(0, base_vocab, ())
    return results


def build_state(
    stack: McaStack,
    base_vocab: Vocabulary,
    proxy: Proxy = WEAKNESS,
    pins: Mapping[int, Statement | Sequence[int]] | None = None,
) -> McaState:
    """Realise the stack level by level, learning with ``proxy`` unless a level is pinned.

    ``pins`` maps a level to a fixed policy (a statement of that level's
    language, or the programs it contains), modelling a static layer.
    """
    return _realise(stack, base_vocab, proxy, pins or {}, branch=False)[0]


def explore_states(
    stack: McaStack,
    base_vocab: Vocabulary,
    proxy: Proxy = WEAKNESS,
    pins: Mapping[int, Statement | Sequence[int]] | None = None,
) -> list[McaState]:
    """Every state reachable when each level may take any proxy-maximal policy."""
    return _realise(stack, base_vocab, proxy, pins or {}, branch=True)


def _task_key(t: Task) -> tuple:
    return (tuple(iter_bits(t.input_bits)), tuple(iter_bits(t.output_bits)))


@dataclass(frozen=True)
class Collective:
    """Parts sharing one vocabulary, kept in canonical order."""

    parts: tuple[Task, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a collective needs at least one part")
        lang = self.parts[0].lang
        if any(p.lang != lang for p in self.parts):
            raise VocabularyMismatchError("parts of a collective must share a vocabulary")

    @classmethod
    def of(cls, parts: Iterable[Task]) -> Collective:
        return cls(tuple(sorted(parts, key=_task_key)))

    @property
    def whole(self) -> Task:
        return merge(self.parts)

    @property
    def lang(self) -> Language:
        return self.parts[0].lang


@dataclass(frozen=True)
class CollectivePolicies:
    policies: frozenset[Policy]
    shared: frozenset[Policy]

    @property
    def strict(self) -> bool:
        """True when the whole admits policies beyond those every part shares."""
        return self.shared < self.policies


def collective_policies(collective: Collective) -> CollectivePolicies:
    lang = collective.lang
    shared = lang.full_bits
    for p in collective.parts:
        shared &= correct_policy_bits(p)
    return CollectivePolicies(
        lang.statements_of(correct_policy_bits(collective.whole)), lang.statements_of(shared)
    )


@dataclass(frozen=True)
class SplinterRow:
    part: Task
    correct_before: int
    correct_after: int


@dataclass(frozen=True)
class SplinterResult:
    retained: Collective
    discarded: tuple[Task, ...]
    rows: tuple[SplinterRow, ...]
    retained_policies: frozenset[Policy] = field(default_factory=frozenset)

    def to_json(self) -> dict:
        return {
            "retained": [p.to_json() for p in self.retained.parts],
            "discarded": [p.to_json() for p in self.discarded],
            "retained_policies": sorted(
                self.retained.lang.vocab.format_statement(s) for s in self.retained_policies
            ),
            "broadening": [
                {"part": r.part.to_json(), "correct_before": r.correct_before,
                 "correct_after": r.correct_after}
                for r in self.rows
            ],
        }


def conflict_matrix(collective: Collective) -> list[list[bool]]:
    """``m[i][j]`` is True when parts ``i`` and ``j`` have no shared policy as a pair."""
    parts = collective.parts
    return [
        [not correct_policy_bits(merge([a, b])) for b in parts]
        for a in parts
    ]


def splinter(collective: Collective) -> SplinterResult:
    """Drop the fewest parts so the rest regain a correct collective policy.

    Among equally small removals the one keeping the canonically first parts
    wins.
    """
    parts = collective.parts
    n = len(parts)
    whole_bits = correct_policy_bits(collective.whole)
    if whole_bits:
        raise NotOverConstrainedError("the collective already has a correct policy")
    if n < 2:
        raise NotOverConstrainedError("splintering needs at least two parts")
    if n > SPLINTER_EXHAUSTIVE_CAP:
        raise CapacityError("collective", n, SPLINTER_EXHAUSTIVE_CAP)
    for keep in range(n - 1, 0, -1):
        for kept in combinations(range(n), keep):
            retained = merge([parts[i] for i in kept])
            bits = correct_policy_bits(retained)
            if bits:
                dropped = tuple(parts[i] for i in range(n) if i not in kept)
                rows = tuple(
                    SplinterRow(p, whole_bits.bit_count(), correct_policy_bits(p).bit_count())
                    for p in dropped
                )
                return SplinterResult(Collective(tuple(parts[i] for i in kept)), dropped, rows,
                                      collective.lang.statements_of(bits))
    raise IrrecoverableCollectiveError(
        "no part of the collective has a correct policy", conflict_matrix(collective)
    )


def _image(lang: Language, k: int) -> frozenset[int]:
    return frozenset(intersect(lang.at(j), lang.vocab) for j in iter_bits(lang.ext_bits(k)))


def policy_images(lang: Language) -> dict[frozenset[int], list[int]]:
    """Group statement ordinals by the vocabulary their completions realise."""
    groups: dict[frozenset[int], list[int]] = {}
    for k in range(len(lang)):
        groups.setdefault(_image(lang, k), []).append(k)
    return groups


@dataclass
class MonotonicityReport:
    """Outcome of checking vocabulary/weakness monotonicity.

    Part (a) compares utilities of one uninstantiated task in nested
    vocabularies; part (b) compares weakness of lower-level policies whose
    derived vocabularies are nested.
    """

    a_checked: int = 0
    a_violations: list[tuple] = field(default_factory=list)
    a_equalities: list[tuple] = field(default_factory=list)
    a_skipped: list[tuple] = field(default_factory=list)
    b_checked: int = 0
    b_violations: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.a_violations and not self.b_violations

    def merge(self, other: MonotonicityReport) -> None:
        self.a_checked += other.a_checked
        self.a_violations += other.a_violations
        self.a_equalities += other.a_equalities
        self.a_skipped += other.a_skipped
        self.b_checked += other.b_checked
        self.b_violations += other.b_violations


def _check_pair(small: Vocabulary, big: Vocabulary) -> None:
    if small.universe != big.universe or not small.issubset(big) or small == big:
        raise ValueError("vocabulary pairs must be properly nested")


def _try_utility(lam: UninstantiatedTask, vocab: Vocabulary) -> int | str:
    try:
        task = instantiate(lam, vocab)
    except UninstantiableError as exc:
        return exc.cause
    if not correct_policy_bits(task):
        return "no-policy"
    return utility(task)


def check_utility_monotone(
    lam: UninstantiatedTask,
    vocab_pairs: Iterable[tuple[Vocabulary, Vocabulary]],
    cache: dict | None = None,
) -> MonotonicityReport:
    report = MonotonicityReport()
    for small, big in vocab_pairs:
        _check_pair(small, big)
        if cache is not None:
            ua = cache.get((lam, small))
            if ua is None:
                ua = cache[(lam, small)] = _try_utility(lam, small)
            ub = cache.get((lam, big))
            if ub is None:
                ub = cache[(lam, big)] = _try_utility(lam, big)
        else:
            ua, ub = _try_utility(lam, small), _try_utility(lam, big)
        if isinstance(ua, str) or isinstance(ub, str):
            report.a_skipped.append((small, big, ua if isinstance(ua, str) else ub))
            continue
        report.a_checked += 1
        if ua > ub:
            report.a_violations.append((small, big, ua, ub))
        elif ua == ub:
            report.a_equalities.append((small, big, ua, ub))
    return report


def check_weakness_monotone(
    lang: Language, vocab_pairs: Iterable[tuple[Vocabulary, Vocabulary]]
) -> MonotonicityReport:
    report = MonotonicityReport()
    groups = policy_images(lang)
    for small, big in vocab_pairs:
        _check_pair(small, big)
        for ka in groups.get(frozenset(small.programs), ()):
            for kb in groups.get(frozenset(big.programs), ()):
                report.b_checked += 1
                wa, wb = lang.ext_bits(ka).bit_count(), lang.ext_bits(kb).bit_count()
                if not wa < wb:
                    report.b_violations.append((lang.at(ka), lang.at(kb), wa, wb))
    return report


def image_pairs(lang: Language) -> list[tuple[Vocabulary, Vocabulary]]:
    """Every properly nested pair of derived vocabularies of ``lang``'s policies."""
    universe = lang.vocab.universe
    images = sorted(policy_images(lang), key=lambda s: (len(s), sorted(s)))
    vocabs = {img: Vocabulary.of(universe, img, cap=64) for img in images}
    return [(vocabs[a], vocabs[b]) for a in images for b in images if a < b]


def validate_monotonicity(
    lang: Language,
    vocab_pairs: Sequence[tuple[Vocabulary, Vocabulary]],
    lam: UninstantiatedTask,
) -> MonotonicityReport:
    """Check both monotonicity parts over the given nested vocabulary pairs."""
    report = check_utility_monotone(lam, vocab_pairs)
    report.merge(check_weakness_monotone(lang, vocab_pairs))
    return report
