from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from enactive.tasks import make_task  # noqa: E402
from enactive.universe import Universe, Vocabulary, language_for  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "enactive" / "data"
FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

A, B, C = 0b01, 0b10, 0b11


@pytest.fixture(scope="session")
def worked():
    """The two-state universe with programs a={s0}, b={s1}, c={s0,s1}."""
    return language_for(Vocabulary.of(Universe(2), [A, B, C]))


def stmt(lang, *programs):
    return lang.vocab.statement(programs)


def task(lang, inputs, outputs):
    return make_task([stmt(lang, *x) for x in inputs], [stmt(lang, *x) for x in outputs], lang)


ACCEPTANCE: dict[str, tuple[bool, str]] = {}
ACCEPTANCE_NOTES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    for note in ACCEPTANCE_NOTES:
        terminalreporter.write_line(f"[NOTE] {note}")
