from fha import checker as ck
from fha import scenarios, stdlib
from fha import syntax as s
from fha.syntax import Mode

PRE = stdlib.builtin_prelude()


def test_enough_hand_written_boolean_programs():
    bools = [sc for sc in scenarios.hand_written(PRE)
             if sc.program.main.mode is Mode.TOTAL
             and ck.normalize_type(ck.empty_context(PRE, sc.program), sc.program.main.type) == s.BOOL]
    assert len(bools) >= 50


def test_every_corpus_file_names_its_expected_value():
    for name in scenarios.corpus_names():
        assert scenarios.expected_of(scenarios.corpus_source(name))


def test_scenario_names_are_unique():
    names = [sc.name for sc in scenarios.hand_written(PRE)]
    assert len(names) == len(set(names))


def test_modular_scenarios_cover_stacked_handlers():
    names = {sc.name for sc in scenarios.modular_scenarios()}
    assert {"modular_state_over_raise", "modular_raise_under_state"} <= names
