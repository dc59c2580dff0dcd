import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fha import acceptance, laws, parser, scenarios, stdlib
from fha import checker as ck
from fha import evaluator as ev
from fha import syntax as s
from fha.gen import Gen

CTX = laws.law_context(stdlib.builtin_prelude())
GLOB = ck.Globals.of(CTX)


@pytest.mark.parametrize("schema", laws.SCHEMAS)
def test_schema_instances_hold(schema):
    rs = laws.run_schema(schema, 30, seed=1, context=CTX)
    bad = [r for r in rs if not r.ok]
    assert not bad, bad[0]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(laws.SCHEMAS), st.integers(0, 10**6))
def test_schema_property(schema, seed):
    inst = laws.make_instance(schema, Gen.seeded(seed, 3), GLOB)
    r = laws.check_instance(inst, CTX)
    assert r.ok, r


def test_instances_are_random_but_reproducible():
    a = laws.run_schema("let-assoc", 5, seed=3, context=CTX)
    b = laws.run_schema("let-assoc", 5, seed=3, context=CTX)
    assert [r.instance for r in a] == [r.instance for r in b]
    assert len({r.instance for r in a}) > 1


def test_hdl_let_is_not_a_law():
    # the raw handler hOdd separates handling a let from the bind split
    prog = parser.parse_program(scenarios.corpus_source("hdl_let"), CTX)
    ctx = s.Program(tuple(CTX.decls) + tuple(d for d in prog.decls if not isinstance(d, s.Main)))
    odd = s.HandlerRef("hOdd")
    lhs = s.Handle(odd, s.LetIn(s.Val(s.TT), s.Val(s.Var(0))), s.BOOL)
    rhs = s.apps(s.Const("oddBind"), s.BOOL, s.BOOL, s.Handle(odd, s.Val(s.TT), s.BOOL),
                 s.Lam(s.BOOL, s.Handle(odd, s.Val(s.Var(0)), s.BOOL), "x"))
    r = laws.check_instance(laws.LawInstance("hdl-let", "Exc", s.BOOL, lhs, rhs, True), ctx)
    assert (r.eval_lhs, r.eval_rhs) == ("tt", "ff")
    assert not r.ok and not r.extract_ok


def test_unknown_schema():
    with pytest.raises(ValueError):
        laws.make_instance("nope", Gen.seeded(0), GLOB)


def test_generated_programs_are_well_typed_booleans():
    ctx = acceptance.generator_context()
    for _, p in acceptance.generated_programs(100):
        ck.check_program(p, ctx)
        out = ev.run_program(p, 1_000_000, ctx)
        assert isinstance(out, ev.Done) and out.value in (ev.TT, ev.FF)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 5))
def test_generator_is_well_typed_property(seed, depth):
    ctx = acceptance.generator_context()
    p = Gen.seeded(seed, depth).program(s.Program(()))
    ck.check_program(p, ctx)


def test_id_inhabitants_are_distinct_and_well_typed():
    ts = acceptance.id_inhabitants(20)
    assert len(set(ts)) == 20
    for t in ts:
        ck.check_program(s.Program((s.TermDef("t", acceptance.POLY_ID_TYPE, t),)),
                         acceptance.generator_context())
