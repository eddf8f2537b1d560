from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import A, B, C, stmt, task
from enactive.errors import (
    EmptyInputsError,
    EmptyOutputsError,
    ForeignStatementError,
    IncorrectPolicyError,
    NoOutputError,
    NoParentError,
    OutputsNotInExtensionError,
    UndefinedUtilityError,
    UnlearnableError,
)
from enactive.tasks import (
    SIMPLICITY,
    WEAKNESS,
    Proxy,
    correct_policies,
    correct_policy_bits,
    generalization_counts,
    generalization_probability_closed,
    generalization_probability_oracle,
    generalization_report,
    generalizes,
    infer,
    is_child_or_equal,
    is_correct,
    is_parent,
    learn,
    make_task,
    merge,
    necessity_check,
    policy_task,
    proxy_efficiency,
    task_from_bits,
    task_level,
    utility,
)
from strategies import any_tasks, languages, tasks_with_policy


def ref_lang(lang):
    return oracles.language(lang.vocab.programs, lang.vocab.universe.state_count)


def progs(lang, bits):
    return frozenset(frozenset(lang.vocab.programs_of(x)) for x in lang.sorted_statements(bits))


@pytest.fixture
def star(worked):
    """Input {a}, correct output {a, c}."""
    return task(worked, [[A]], [[A, C]])


# ---------------------------------------------------------------- construction


def test_star_correct_policies(worked, star):
    assert correct_policies(star) == {stmt(worked, C), stmt(worked, A, C)}


def test_empty_inputs_rejected(worked):
    with pytest.raises(EmptyInputsError):
        make_task([], [stmt(worked, A)], worked)


def test_empty_outputs_rejected(worked):
    with pytest.raises(EmptyOutputsError):
        make_task([stmt(worked, A)], [], worked)


def test_output_outside_extension_names_offender(worked):
    with pytest.raises(OutputsNotInExtensionError) as info:
        task(worked, [[A]], [[B, C]])
    assert "110" in str(info.value)
    assert info.value.offending == (stmt(worked, B, C),)


def test_foreign_statement_rejected(worked):
    with pytest.raises(ForeignStatementError):
        make_task([stmt(worked, A, B)], [stmt(worked, A)], worked)


def test_task_without_policy(worked):
    t = task(worked, [[A], [C]], [[A, C], [B, C]])
    assert correct_policies(t) == frozenset()
    with pytest.raises(UnlearnableError):
        learn(t)
    with pytest.raises(UndefinedUtilityError):
        utility(t)


# ---------------------------------------------------------------- hierarchy


def test_parent_relation(worked, star):
    big = task(worked, [[A], [B]], [[A, C], [B, C]])
    assert is_parent(star, big)
    assert not is_parent(big, star)
    assert not is_parent(star, star)
    assert is_child_or_equal(star, star)


def test_levels(worked, star):
    assert task_level(star) == 0
    assert task_level(task(worked, [[A], [B]], [[A, C], [B, C]])) == 1
    assert task_level(task(worked, [[A], [B], [C]], [[A, C], [B, C], [C]])) == 2


@given(any_tasks(max_states=2, max_size=3))
def test_level_matches_brute_force(t):
    lang = t.lang
    ref = oracles.chain_level(progs(lang, t.input_bits), progs(lang, t.output_bits), ref_lang(lang))
    assert task_level(t) == ref


@given(any_tasks(max_states=3, max_size=3))
def test_level_bounded_by_input_count(t):
    assert 0 <= task_level(t) <= t.input_bits.bit_count() - 1


def test_merge_organ(worked):
    parts = [task(worked, [[A]], [[A, C]]), task(worked, [[B]], [[B, C]])]
    whole = merge(parts)
    assert correct_policies(whole) == {stmt(worked, C)}
    shared = correct_policies(parts[0]) & correct_policies(parts[1])
    assert shared == correct_policies(whole)


def test_merge_conflict(worked):
    whole = merge([task(worked, [[A]], [[A, C]]), task(worked, [[C]], [[B, C]])])
    assert correct_policies(whole) == frozenset()


@given(languages(max_states=3, max_size=4), st.data())
def test_shared_policies_solve_the_merge(lang, data):
    parts = []
    for _ in range(data.draw(st.integers(1, 3))):
        ins = data.draw(st.integers(1, lang.full_bits))
        avail = lang.ext_of_bits(ins)
        outs = data.draw(st.integers(1, avail)) & avail or avail
        parts.append(task_from_bits(lang, ins, outs))
    shared = correct_policy_bits(parts[0])
    for p in parts[1:]:
        shared &= correct_policy_bits(p)
    assert shared & ~correct_policy_bits(merge(parts)) == 0


# ---------------------------------------------------------------- policies


@given(any_tasks(max_states=3, max_size=4))
def test_correct_policies_match_brute_force(t):
    lang = t.lang
    ref = oracles.policies(progs(lang, t.input_bits), progs(lang, t.output_bits), ref_lang(lang))
    assert progs(lang, correct_policy_bits(t)) == ref


def test_infer_on_star(worked, star):
    out = infer(stmt(worked, C), stmt(worked, A), star)
    assert out.output == stmt(worked, A, C) and out.complete


def test_infer_no_output(worked):
    t = task(worked, [[A], [B]], [[A, C], [B, C]])
    with pytest.raises(NoOutputError):
        infer(stmt(worked, A, C), stmt(worked, B), t)


def test_infer_seeded_is_reproducible(worked):
    t = task(worked, [[C]], [[C], [A, C], [B, C]])
    picks = [infer(stmt(worked, C), stmt(worked, C), t, "seeded", s).output for s in range(20)]
    again = [infer(stmt(worked, C), stmt(worked, C), t, "seeded", np.random.default_rng(s)).output
             for s in range(20)]
    assert picks == again
    assert len(set(picks)) > 1


@given(tasks_with_policy(max_states=3, max_size=4), st.data())
def test_correct_policy_infers_only_correct_outputs(pair, data):
    t, k = pair
    assume(k is not None)
    lang = t.lang
    x = data.draw(st.sampled_from(lang.sorted_statements(t.input_bits)))
    try:
        out = infer(lang.at(k), x, t)
    except NoOutputError:
        return
    assert out.complete


def test_learn_on_star(worked, star):
    assert learn(star, WEAKNESS) == stmt(worked, C)
    assert learn(star, SIMPLICITY) == stmt(worked, C)
    assert utility(star) == 2


def test_proxy_parse():
    assert Proxy.parse("random:3") == Proxy("random", 3)
    assert Proxy.parse("weakness").name == "weakness"
    with pytest.raises(ValueError):
        Proxy.parse("shortest")


@given(any_tasks(max_states=3, max_size=4))
def test_weakness_learns_a_weakest_policy(t):
    pis = correct_policy_bits(t)
    assume(pis)
    lang = t.lang
    best = max(lang.ext_bits(k).bit_count() for k in range(len(lang)) if pis >> k & 1)
    assert lang.weakness(learn(t)) == best
    assert utility(t) == best - t.output_bits.bit_count()


def test_policy_task(worked, star):
    g = policy_task(star, stmt(worked, C))
    assert g.input_bits == worked.full_bits
    assert progs(worked, g.output_bits) == {frozenset({C}), frozenset({A, C}), frozenset({B, C})}
    assert is_correct(stmt(worked, C), g)
    with pytest.raises(IncorrectPolicyError):
        policy_task(star, stmt(worked, A))


@given(tasks_with_policy(max_states=2, max_size=3))
def test_policy_task_is_highest_with_policy_outputs(pair):
    t, k = pair
    assume(k is not None)
    lang = t.lang
    g = policy_task(t, lang.at(k))
    assert g.output_bits == lang.ext_bits(k)
    ref = ref_lang(lang)
    target = progs(lang, lang.ext_bits(k))
    for ins, outs in oracles.tasks(ref):
        if outs == target:
            assert ins <= progs(lang, g.input_bits)


# ---------------------------------------------------------------- generalisation


def test_star_closed_form(worked, star):
    assert generalization_probability_closed(star, stmt(worked, C)) == Fraction(1, 2)
    assert generalization_probability_closed(star, stmt(worked, A, C)) == Fraction(1, 8)


def test_star_oracle(worked, star):
    # the class {ac, c} needs input c, which forces bc in as well
    assert generalization_probability_oracle(star, stmt(worked, C)) == Fraction(3, 8)
    assert generalization_probability_oracle(star, stmt(worked, A, C)) == Fraction(1, 8)
    rep = generalization_report(star, stmt(worked, C))
    assert (rep.generalizing_class_count, rep.parent_class_count) == (3, 8)
    assert not rep.equal


def test_oracle_needs_a_parent(worked):
    everything = task_from_bits(worked, worked.full_bits, worked.ext_bits(2))
    with pytest.raises(NoParentError):
        generalization_report(everything, worked.at(2))


@given(tasks_with_policy(max_states=3, max_size=3))
def test_oracle_methods_match_brute_force(pair):
    t, k = pair
    assume(k is not None and t.input_bits != t.lang.full_bits)
    lang = t.lang
    hit, total = oracles.generalization(progs(lang, t.input_bits), progs(lang, t.output_bits),
                                        frozenset(lang.vocab.programs_of(lang.at(k))), ref_lang(lang))
    for method in ("classes", "parents"):
        rep = generalization_report(t, lang.at(k), method)
        assert (rep.generalizing_class_count, rep.parent_class_count) == (hit, total)


@given(tasks_with_policy(max_states=3, max_size=4))
def test_closed_form_bounds_oracle(pair):
    t, k = pair
    assume(k is not None and t.input_bits != t.lang.full_bits)
    policy = t.lang.at(k)
    assert generalization_probability_oracle(t, policy, "parents") <= generalization_probability_closed(t, policy)


@given(tasks_with_policy(max_states=3, max_size=4))
def test_closed_form_monotone_in_weakness_among_policies(pair):
    t, k = pair
    assume(k is not None)
    lang = t.lang
    pis = [j for j in range(len(lang)) if correct_policy_bits(t) >> j & 1]
    for i in pis:
        for j in pis:
            if lang.ext_bits(i) & lang.ext_bits(j) == lang.ext_bits(i):
                assert (generalization_probability_closed(t, lang.at(i))
                        <= generalization_probability_closed(t, lang.at(j)))


def test_necessity_on_star(worked, star):
    parent = task(worked, [[A], [B]], [[A, C], [B, C]])
    rep = necessity_check(star, parent)
    assert {r.policy for r in rep.rows} == correct_policies(star)
    assert not rep.violations
    assert [r.generalizes for r in rep.rows if r.policy == stmt(worked, C)] == [True]
    assert generalizes(stmt(worked, C), parent)


@given(any_tasks(max_states=3, max_size=4))
def test_solving_policies_are_at_least_as_weak_as_the_outputs(t):
    lang = t.lang
    for k in range(len(lang)):
        if correct_policy_bits(t) >> k & 1:
            assert lang.ext_bits(k).bit_count() >= t.output_bits.bit_count()


# ---------------------------------------------------------------- efficiency


def test_counts_on_worked(worked):
    assert generalization_counts(worked) == [28, 28, 31, 28, 28]


@given(languages(max_states=3, max_size=3))
def test_counts_match_brute_force(lang):
    ref = ref_lang(lang)
    counts = generalization_counts(lang)
    for k, x in enumerate(lang):
        p = frozenset(lang.vocab.programs_of(x))
        n = sum(1 for ins, outs in oracles.tasks(ref) if p in oracles.policies(ins, outs, ref))
        assert counts[k] == n


def test_efficiency_on_worked(worked):
    assert proxy_efficiency(WEAKNESS, SIMPLICITY, worked) == -2
    assert proxy_efficiency(WEAKNESS, WEAKNESS, worked) == 0


@given(languages(max_states=3, max_size=4), st.integers(0, 50))
def test_efficiency_is_antisymmetric(lang, seed):
    r = Proxy("random", seed)
    assert proxy_efficiency(WEAKNESS, r, lang) == -proxy_efficiency(r, WEAKNESS, lang)
    assert proxy_efficiency(SIMPLICITY, r, lang) == -proxy_efficiency(r, SIMPLICITY, lang)
