import pytest

from fha import checker as ck
from fha import evaluator as ev
from fha import extract as ex
from fha import lam as L
from fha import parser, scenarios, stdlib
from fha import syntax as s

PRE = stdlib.builtin_prelude()


def decoded(prog, budget=1_000_000):
    glob = ck.check_program(prog, PRE)
    t = ex.extract_program(prog, PRE, glob)
    v = ex.decode_value(t, prog.main.type, glob, budget)
    return "unknown" if isinstance(v, ex.Unknown) else ev.render(v)


def test_booleans_extract_to_church_booleans():
    assert L.normalize(ex.extract_term(s.TT)) == ex.TRUE
    assert L.normalize(ex.extract_term(s.FF)) == ex.FALSE
    assert ex.TRUE != ex.FALSE


def test_extracted_terms_are_closed():
    for sc in scenarios.hand_written(PRE)[:10]:
        glob = ck.check_program(sc.program, PRE)
        assert L.closed(ex.extract_program(sc.program, PRE, glob))


@pytest.mark.parametrize("sc", scenarios.hand_written(PRE), ids=lambda sc: sc.name)
def test_extraction_agrees_with_goldens(sc):
    assert decoded(sc.program) == sc.expected


def test_pairs_and_sums_decode():
    t = ex.extract_term(s.Pair(s.TT, s.Inr(s.TSum(s.UNIT, s.BOOL), s.FF)))
    v = ex.decode_value(t, s.TProd(s.BOOL, s.TSum(s.UNIT, s.BOOL)))
    assert ev.render(v) == "(tt,inr ff)"


def test_types_are_erased():
    poly = s.TyApp(s.TyLam(s.TY, s.Lam(s.TVar(0), s.Var(0), "x"), "a"), s.BOOL)
    assert L.normalize(L.app(ex.extract_term(poly), ex.TRUE)) == ex.TRUE


def test_divergence_exceeds_the_budget():
    p = parser.parse_program("main[partial] VoidH : Bool = fix (self. force self)", PRE)
    assert decoded(p, 10_000) == "unknown"


def test_countdown_within_small_budget():
    p = parser.parse_program(scenarios.corpus_source("countdown"), PRE)
    assert decoded(p, 10_000) == "tt"


def test_handler_triple_projections():
    h = ex.triple(L.LFreeConst("R"), L.LFreeConst("B"), L.LFreeConst("M"))
    assert L.normalize(ex.ret_of(h)) == L.LFreeConst("R")
    assert L.normalize(ex.bind_of(h)) == L.LFreeConst("B")
    assert L.normalize(ex.malg_of(h)) == L.LFreeConst("M")


def test_program_without_main_is_an_error():
    with pytest.raises(ex.ExtractError):
        ex.extract_program(s.Program(()), PRE, ck.Globals.of(PRE))
