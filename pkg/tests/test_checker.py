import pytest

from fha import checker as ck
from fha import parser, scenarios, stdlib
from fha import syntax as s

PRE = stdlib.builtin_prelude()


def check(src):
    p = parser.parse_program(src, PRE)
    return ck.check_program(p, PRE)


def rejects(src, match=None):
    with pytest.raises(ck.FhaTypeError, match=match):
        check(src)


def test_prelude_checks():
    glob = ck.check_program(PRE)
    assert {"VoidH", "Exc"} <= set(glob.effects)
    assert "hExc" in glob.handlers


@pytest.mark.parametrize("name", scenarios.corpus_names())
def test_corpus_checks(name):
    check(scenarios.corpus_source(name))


def test_kind_inference():
    ctx = ck.empty_context(PRE)
    assert ck.infer_kind(ctx, parser.parse_type("Maybe", PRE)) == s.EFTY
    carrier = stdlib.effect_decl("Exc").carrier
    assert ck.infer_kind(ctx, carrier) == s.HTYCO


def test_kind_errors():
    rejects("type T : Ty = Bool Bool", "kind")
    rejects(r"type T : Ty -> Ty = \(a:Ty -> Ty). a", "kind")


def test_type_equality_up_to_beta():
    ctx = ck.empty_context(PRE)
    assert ck.types_equal(ctx, parser.parse_type("Maybe Bool", PRE), s.TSum(s.UNIT, s.BOOL))
    assert ck.types_equal(ctx, parser.parse_type(r"(\(a:Ty). a * a) Unit", PRE),
                          s.TProd(s.UNIT, s.UNIT))


def test_type_equality_up_to_eta():
    ctx = ck.empty_context(PRE)
    eta = parser.parse_type(r"\(a:Ty). Maybe a", PRE)
    assert ck.types_equal(ctx, eta, parser.parse_type("Maybe", PRE))


def test_mismatch_reports_both_types():
    with pytest.raises(ck.FhaTypeError) as err:
        check("main[total] VoidH : Bool = val ()")
    assert err.value.expected == s.BOOL and err.value.actual == s.UNIT


def test_application_and_polymorphism():
    check(r"term id : forall (a:Ty). a -> a = /\(a:Ty). \(x:a). x"
          "\nmain[total] VoidH : Bool = val id [Bool] tt")
    rejects(r"term id : forall (a:Ty). a -> a = /\(a:Ty). \(x:a). tt")


def test_injection_needs_target_in_synthesis_position():
    rejects("main[total] VoidH : Bool = val case inl tt { inl x -> x ; inr y -> tt }",
            "sum type")
    check("main[total] VoidH : Bool = val case inl[Bool + Unit] tt { inl x -> x ; inr y -> tt }")


def test_operations_need_the_effect():
    rejects("main[total] VoidH : Bool = throw[Bool]")
    check(r"term t : Th Exc Bool = thunk throw")


def test_fix_only_in_partial_mode():
    rejects("main[total] VoidH : Bool = fix (self. force self)")
    check("main[partial] VoidH : Bool = fix (self. force self)")


def test_forcing_a_total_thunk_in_partial_code_is_rejected():
    rejects("term t : Th VoidH Bool = thunk val tt\nmain[partial] VoidH : Bool = force t")


def test_handler_field_types_are_checked():
    rejects(r"""handler h : Exc = {
  M = Maybe;
  ret = /\(a:Ty). \(x:a). inl ();
  bind = /\(a:Ty). /\(b:Ty). \(m: Maybe a). \(k: a -> Maybe b). m;
  malg = /\(a:Ty). \(o: Unit + Maybe a * Maybe a). inl ()
}""")


def test_handler_rec_side_condition():
    check(scenarios.corpus_source("partial_exc"))
    rejects(r"""handler h : Exc = {
  M = \(a:Ty). PTh VoidH (Maybe a);
  ret = /\(a:Ty). \(x:a). pthunk val inr x;
  bind = /\(a:Ty). /\(b:Ty). \(m: PTh VoidH (Maybe a)). \(k: a -> PTh VoidH (Maybe b)). m;
  malg = /\(a:Ty). \(o: Unit + PTh VoidH (Maybe a) * PTh VoidH (Maybe a)). fst o
} via Bool""")


def test_handle_result_is_inferred_from_the_expected_type():
    check("term m : Maybe Bool = handle hExc throw")


def test_effect_declarations_are_checked():
    row = stdlib.elaborate_row([s.OpSig("get", s.UNIT, s.BOOL)], "G")
    ck.check_effect(row, ck.Globals.of(PRE))
    bad = s.EffectDecl("Bad", row.carrier, row.hmap, row.hfmap)
    with pytest.raises(ck.FhaTypeError):
        ck.check_effect(bad, ck.Globals.of(PRE))


def test_operation_effects_are_recorded():
    src = "term t : Th Exc Bool = thunk throw"
    p = parser.parse_program(src, PRE)
    glob = ck.check_program(p, PRE)
    op = p.lookup(s.TermDef, "t").body.comp
    assert glob.op_effect(op) == "Exc"


def test_names_must_be_unique():
    with pytest.raises(parser.ParseError, match="duplicate"):
        check("term a : Bool = tt\nterm a : Bool = ff")
    p = s.Program((s.TermDef("a", s.BOOL, s.TT), s.TermDef("a", s.BOOL, s.FF)))
    with pytest.raises(ck.FhaTypeError):
        ck.check_program(p, PRE)


def test_declaration_order_matters():
    with pytest.raises((ck.FhaTypeError, parser.ParseError)):
        check("term a : Bool = b\nterm b : Bool = tt")
