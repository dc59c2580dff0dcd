import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fha import acceptance, parser, scenarios, stdlib
from fha import syntax as s
from fha.syntax import Mode

PRE = stdlib.builtin_prelude()


def test_church_two_parses():
    p = parser.parse_program(scenarios.corpus_source("church_two"), PRE)
    two = p.lookup(s.TermDef, "two")
    assert two.type == s.TForall(s.TY, s.arrows(s.TArrow(s.TVar(0), s.TVar(0)), s.TVar(0), s.TVar(0)))
    assert p.main.mode is Mode.TOTAL and p.main.effect == "VoidH"


def test_types_and_kinds():
    assert parser.parse_kind("(Ty -> Ty) -> Ty -> Ty") == s.HTYCO
    assert parser.parse_type("Bool * Unit + Empty") == s.TSum(s.TProd(s.BOOL, s.UNIT), s.EMPTY)
    assert parser.parse_type("Bool -> Bool -> Bool") == s.arrows(s.BOOL, s.BOOL, s.BOOL)
    t = parser.parse_type(r"\(F:Ty -> Ty). F Bool")
    assert t == s.TLam(s.EFTY, s.TApp(s.TVar(0), s.BOOL))


def test_thunk_types_name_effects():
    assert parser.parse_type("Th Exc Bool", PRE) == s.TTh("Exc", s.BOOL)
    assert parser.parse_type("PTh VoidH Unit", PRE) == s.TPTh("VoidH", s.UNIT)


def test_de_bruijn_indices_from_names():
    t = parser.parse_term(r"\(x:Bool). \(y:Bool). x", PRE)
    assert t == s.Lam(s.BOOL, s.Lam(s.BOOL, s.Var(1)))


def test_throw_and_catch_sugar():
    c = parser.parse_comp("catch (throw) (val tt)", PRE)
    exc = stdlib.exc_package()
    assert c == exc.catch(exc.throw(), s.Val(s.TT))


def test_row_sugar_declares_effect_and_operations():
    p = parser.parse_program(
        "effect St { get : Unit ~> Bool; put : Bool ~> Unit; }\n"
        "main[total] St : Bool = let u = put tt in get ()", PRE)
    assert p.lookup(s.EffectDef, "St") is not None
    assert isinstance(p.main.comp, s.LetIn) and isinstance(p.main.comp.bound, s.Op)


def test_parse_error_spans_point_at_offending_token():
    src = "main[total] VoidH : Bool = val ("
    with pytest.raises(parser.ParseError) as err:
        parser.parse_program(src, PRE, "f.fha")
    assert err.value.span.start == len(src)
    assert "f.fha" in str(err.value)


def test_unknown_names_are_parse_errors():
    with pytest.raises(parser.ParseError, match="unbound variable"):
        parser.parse_term("zzz", PRE)
    with pytest.raises(parser.ParseError, match="unknown handler"):
        parser.parse_term("handle nope (val tt)", PRE)


def test_duplicate_operation_in_one_row_is_an_error():
    with pytest.raises(parser.ParseError):
        parser.parse_program("effect E { a : Unit ~> Unit; a : Unit ~> Unit; }", PRE)


def test_keywords_are_reserved():
    with pytest.raises(parser.ParseError):
        parser.parse_term(r"\(val:Bool). val", PRE)


@pytest.mark.parametrize("sc", scenarios.hand_written(PRE)[:20], ids=lambda sc: sc.name)
def test_hand_written_round_trip(sc):
    assert parser.parse_program(parser.pretty_print(sc.program, PRE), PRE) == sc.program


def test_generated_programs_round_trip():
    ctx = acceptance.generator_context()
    for _, p in acceptance.generated_programs(500):
        assert parser.parse_program(parser.pretty_print(p, ctx), ctx) == p


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_program_round_trip_property(seed):
    ctx = acceptance.generator_context()
    from fha.gen import Gen
    p = Gen.seeded(seed, 4).program(s.Program(()))
    assert parser.parse_program(parser.pretty_print(p, ctx), ctx) == p


def test_printer_renames_shadowed_names():
    t = s.Lam(s.BOOL, s.Lam(s.BOOL, s.Var(1), "x"), "x")
    text = parser.pretty_term(t, PRE)
    assert parser.parse_term(text, PRE) == t
