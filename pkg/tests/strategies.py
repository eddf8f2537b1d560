from __future__ import annotations

from hypothesis import strategies as st

from enactive.tasks import task_from_bits
from enactive.universe import Universe, Vocabulary, language_for


@st.composite
def vocabularies(draw, max_states=3, max_size=4):
    n = draw(st.integers(1, max_states))
    full = (1 << n) - 1
    size = draw(st.integers(1, min(max_size, full)))
    programs = draw(st.lists(st.integers(1, full), min_size=size, max_size=size, unique=True))
    return Vocabulary.of(Universe(n), programs)


@st.composite
def languages(draw, max_states=3, max_size=4):
    return language_for(draw(vocabularies(max_states, max_size)))


@st.composite
def tasks_with_policy(draw, max_states=3, max_size=4):
    """A task together with one of its correct policies (ordinal)."""
    lang = draw(languages(max_states, max_size))
    ins = draw(st.integers(1, lang.full_bits))
    k = draw(st.integers(0, len(lang) - 1))
    outs = lang.ext_bits(k) & lang.ext_of_bits(ins)
    if not outs:
        outs = lang.ext_of_bits(ins)
        k = None
    return task_from_bits(lang, ins, outs), k


@st.composite
def any_tasks(draw, max_states=3, max_size=4):
    lang = draw(languages(max_states, max_size))
    ins = draw(st.integers(1, lang.full_bits))
    avail = lang.ext_of_bits(ins)
    outs = draw(st.integers(1, avail)) & avail or avail
    return task_from_bits(lang, ins, outs)
