"""States, declarative programs, vocabularies and the formal language they induce.

Programs are plain ``int`` bit masks over state indices (bit ``k`` set means
state ``k`` belongs to the program).  A statement is a bit mask over the
*vocabulary* indices, wrapped in :class:`Statement` so it cannot be confused
with a program.  Sets of statements inside a :class:`Language` are handled as
bit masks over statement ordinals, which keeps the exhaustive sweeps cheap.

Text encodings are big-endian 0/1 strings: the first character is the highest
index.  For statements this makes lexicographic string order coincide with the
canonical (integer) order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator

import numpy as np

from .errors import CapacityError, InvalidStatementError, VocabularyMismatchError

DEFAULT_STATE_CAP = 16
DEFAULT_VOCAB_CAP = 20
HARD_VOCAB_LIMIT = 64  # statement masks are packed into uint64 for the extension tables
BULK_TABLE_LIMIT = 4096

Program = int


def cache_enabled() -> bool:
    """Memoisation switch; ``ENACTIVE_NO_CACHE=1`` turns every internal cache off."""
    return os.environ.get("ENACTIVE_NO_CACHE", "").strip().lower() not in ("1", "true", "yes")


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_str(mask: int, width: int) -> str:
    return format(mask, f"0{width}b") if width else ""


def str_to_bits(text: str, width: int, what: str = "bit string") -> int:
    if len(text) != width or any(ch not in "01" for ch in text):
        raise ValueError(f"{what} {text!r} must be a 0/1 string of length {width}")
    return int(text, 2) if width else 0


@dataclass(frozen=True)
class Universe:
    """A finite environment with states ``0 .. state_count - 1``."""

    state_count: int
    cap: int = field(default=DEFAULT_STATE_CAP, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.state_count < 1:
            raise ValueError(f"state_count must be positive, got {self.state_count}")
        if self.state_count > self.cap:
            raise CapacityError("universe", self.state_count, self.cap)

    @property
    def full(self) -> Program:
        """The program true in every state."""
        return (1 << self.state_count) - 1

    def program(self, states: Iterable[int]) -> Program:
        mask = 0
        for s in states:
            if not 0 <= s < self.state_count:
                raise ValueError(f"state {s} outside universe of {self.state_count} states")
            mask |= 1 << s
        return mask

    def check_program(self, program: Program) -> Program:
        if not 0 <= program <= self.full:
            raise ValueError(f"program {program:#x} has bits outside {self.state_count} states")
        return program

    def all_programs(self, include_empty: bool = True) -> tuple[Program, ...]:
        """The program space P in ascending order."""
        return tuple(range(0 if include_empty else 1, self.full + 1))

    def format_program(self, program: Program) -> str:
        return bits_to_str(program, self.state_count)

    def parse_program(self, text: str) -> Program:
        return str_to_bits(text, self.state_count, "program")


@dataclass(frozen=True, order=True)
class Statement:
    """A subset of a vocabulary, as a bit mask over vocabulary indices."""

    members: int

    def __len__(self) -> int:
        return self.members.bit_count()

    def indices(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.members))

    def issubset(self, other: Statement) -> bool:
        return self.members & other.members == self.members


@dataclass(frozen=True)
class Vocabulary:
    """A finite, duplicate-free set of programs kept in ascending order.

    Build one with :meth:`of`, which sorts and deduplicates; the raw
    constructor insists on canonical order already.
    """

    universe: Universe
    programs: tuple[Program, ...]
    cap: int = field(default=DEFAULT_VOCAB_CAP, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.programs:
            raise ValueError("a vocabulary needs at least one program")
        if len(self.programs) > min(self.cap, HARD_VOCAB_LIMIT):
            raise CapacityError("vocabulary", len(self.programs), min(self.cap, HARD_VOCAB_LIMIT))
        for p in self.programs:
            self.universe.check_program(p)
        if any(a >= b for a, b in zip(self.programs, self.programs[1:])):
            raise ValueError("vocabulary programs must be strictly ascending (no duplicates)")

    @classmethod
    def of(cls, universe: Universe, programs: Iterable[Program], cap: int = DEFAULT_VOCAB_CAP) -> Vocabulary:
        progs = list(programs)
        if len(set(progs)) != len(progs):
            raise ValueError("duplicate programs in vocabulary")
        return cls(universe, tuple(sorted(progs)), cap)

    @classmethod
    def no_abstraction(cls, universe: Universe, cap: int = DEFAULT_VOCAB_CAP) -> Vocabulary:
        """The vocabulary P of every program, the empty one included."""
        return cls(universe, universe.all_programs(), max(cap, universe.full + 1))

    def __len__(self) -> int:
        return len(self.programs)

    def __iter__(self) -> Iterator[Program]:
        return iter(self.programs)

    def __contains__(self, program: object) -> bool:
        return program in self._positions

    @property
    def _positions(self) -> dict[Program, int]:
        pos = self.__dict__.get("_pos")
        if pos is None:
            pos = {p: k for k, p in enumerate(self.programs)}
            object.__setattr__(self, "_pos", pos)
        return pos

    def position(self, program: Program) -> int:
        try:
            return self._positions[program]
        except KeyError:
            raise InvalidStatementError(
                f"program {self.universe.format_program(program)} is not in the vocabulary"
            ) from None

    def statement(self, programs: Iterable[Program]) -> Statement:
        """The subset of this vocabulary made of ``programs`` (not checked for consistency)."""
        mask = 0
        for p in programs:
            mask |= 1 << self.position(p)
        return Statement(mask)

    def programs_of(self, statement: Statement) -> tuple[Program, ...]:
        if statement.members >> len(self.programs):
            raise InvalidStatementError(f"statement {statement.members:#x} exceeds vocabulary width")
        return tuple(self.programs[k] for k in iter_bits(statement.members))

    def issubset(self, other: Vocabulary) -> bool:
        return self.universe == other.universe and all(p in other for p in self.programs)

    def format_statement(self, statement: Statement) -> str:
        return bits_to_str(statement.members, len(self.programs))

    def parse_statement(self, text: str) -> Statement:
        return Statement(str_to_bits(text, len(self.programs), "statement"))

    def to_json(self) -> dict:
        return {
            "state_count": self.universe.state_count,
            "vocabulary": [self.universe.format_program(p) for p in self.programs],
        }

    @classmethod
    def from_json(
        cls, data: dict, state_cap: int = DEFAULT_STATE_CAP, vocab_cap: int = DEFAULT_VOCAB_CAP
    ) -> Vocabulary:
        universe = Universe(int(data["state_count"]), state_cap)
        return cls.of(universe, (universe.parse_program(s) for s in data["vocabulary"]), vocab_cap)


def intersect(statement: Statement, vocab: Vocabulary) -> Program:
    """The set of states at which every member program is true."""
    if statement.members == 0:
        raise InvalidStatementError("the empty subset is not a statement")
    return reduce(lambda acc, p: acc & p, vocab.programs_of(statement), vocab.universe.full)


def _consistent_subsets(programs: tuple[Program, ...], full: Program) -> list[int]:
    out: list[int] = []
    m = len(programs)

    def grow(start: int, mask: int, common: int) -> None:
        for k in range(start, m):
            c = common & programs[k]
            if c:
                nm = mask | (1 << k)
                out.append(nm)
                grow(k + 1, nm, c)

    grow(0, 0, full)
    out.sort()
    return out


class Language:
    """Every nonempty subset of a vocabulary whose programs share a state.

    Statements are held in canonical order; ``ordinal`` maps a statement to its
    position.  Sets of statements are exchanged as ``int`` masks over
    ordinals by the ``*_bits`` methods and as ``frozenset`` of
    :class:`Statement` by the others.
    """

    def __init__(self, vocab: Vocabulary) -> None:
        self.vocab = vocab
        self._masks = _consistent_subsets(vocab.programs, vocab.universe.full)
        self.statements = tuple(Statement(m) for m in self._masks)
        self._index = {m: k for k, m in enumerate(self._masks)}
        self._array = np.array(self._masks, dtype=np.uint64)
        self._ext: list[int | None] = [None] * len(self._masks)
        self.full_bits = (1 << len(self._masks)) - 1

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self) -> Iterator[Statement]:
        return iter(self.statements)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, Statement) and x.members in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Language) and self.vocab == other.vocab

    def __hash__(self) -> int:
        return hash(self.vocab)

    def __repr__(self) -> str:
        return f"Language({len(self.vocab)} programs, {len(self)} statements)"

    def ordinal(self, x: Statement) -> int:
        try:
            return self._index[x.members]
        except (KeyError, AttributeError):
            raise InvalidStatementError(f"{x!r} is not a statement of this language") from None

    def at(self, k: int) -> Statement:
        return self.statements[k]

    def bits_of(self, xs: Iterable[Statement]) -> int:
        mask = 0
        for x in xs:
            mask |= 1 << self.ordinal(x)
        return mask

    def statements_of(self, bits: int) -> frozenset[Statement]:
        return frozenset(self.statements[k] for k in iter_bits(bits))

    def sorted_statements(self, bits: int) -> list[Statement]:
        return [self.statements[k] for k in iter_bits(bits)]

    def _superset_bits(self, mask: int) -> int:
        m = np.uint64(mask)
        hits = (self._array & m) == m
        return int.from_bytes(np.packbits(hits, bitorder="little").tobytes(), "little")

    def ext_bits(self, k: int) -> int:
        """Extension of the statement with ordinal ``k``, as an ordinal mask."""
        if not cache_enabled():
            return self._superset_bits(self._masks[k])
        e = self._ext[k]
        if e is None:
            e = self._ext[k] = self._superset_bits(self._masks[k])
        return e

    def ext_table(self) -> list[int]:
        """Extension masks for every ordinal."""
        if cache_enabled() and all(e is not None for e in self._ext):
            return list(self._ext)  # type: ignore[arg-type]
        n = len(self._masks)
        if n <= BULK_TABLE_LIMIT:
            a = self._array
            hits = (a[None, :] & a[:, None]) == a[:, None]
            packed = np.packbits(hits, axis=1, bitorder="little")
            table = [int.from_bytes(row.tobytes(), "little") for row in packed]
        else:
            table = [self._superset_bits(m) for m in self._masks]
        if cache_enabled():
            self._ext = list(table)
        return table

    def ext_of_bits(self, bits: int) -> int:
        """Extension of a set of statements given as an ordinal mask."""
        out = 0
        for k in iter_bits(bits):
            out |= self.ext_bits(k)
        return out

    def extension(self, x: Statement) -> frozenset[Statement]:
        return self.statements_of(self.ext_bits(self.ordinal(x)))

    def weakness(self, x: Statement) -> int:
        return self.ext_bits(self.ordinal(x)).bit_count()

    def intersection(self, x: Statement) -> Program:
        return intersect(x, self.vocab)

    def restate(self, x: Statement, source: Vocabulary) -> Statement | None:
        """Re-express a statement of ``source`` in this vocabulary, or None if inexpressible."""
        progs = source.programs_of(x)
        if not all(p in self.vocab for p in progs):
            return None
        y = self.vocab.statement(progs)
        return y if y.members in self._index else None

    def check_same(self, other: Language) -> None:
        if self != other:
            raise VocabularyMismatchError("objects belong to different languages")


def enumerate_language(vocab: Vocabulary) -> Language:
    if len(vocab) > vocab.cap:
        raise CapacityError("vocabulary", len(vocab), vocab.cap)
    return Language(vocab)


_LANGUAGES: dict[Vocabulary, Language] = {}
_LANGUAGE_CACHE_SIZE = 4096


def language_for(vocab: Vocabulary) -> Language:
    """Like :func:`enumerate_language` but reuses languages already built."""
    if not cache_enabled():
        return enumerate_language(vocab)
    lang = _LANGUAGES.get(vocab)
    if lang is None:
        if len(_LANGUAGES) >= _LANGUAGE_CACHE_SIZE:
            _LANGUAGES.clear()
        lang = _LANGUAGES[vocab] = enumerate_language(vocab)
    return lang


def extension(x: Statement, lang: Language) -> frozenset[Statement]:
    """All completions of ``x``; always contains ``x``."""
    return lang.extension(x)


def extension_of_set(xs: Iterable[Statement], lang: Language) -> frozenset[Statement]:
    return lang.statements_of(lang.ext_of_bits(lang.bits_of(xs)))


def weakness(x: Statement, lang: Language) -> int:
    return lang.weakness(x)


def equivalent(x: Statement, y: Statement, lang: Language) -> bool:
    return lang.ext_bits(lang.ordinal(x)) == lang.ext_bits(lang.ordinal(y))
