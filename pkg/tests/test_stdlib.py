import pytest

from fha import checker as ck
from fha import evaluator as ev
from fha import parser, scenarios, stdlib
from fha import syntax as s
from fha.syntax import Mode

PRE = stdlib.builtin_prelude()
GLOB = ck.Globals.of(PRE)


def normal(t):
    return ck.normalize_type(ck.empty_context(PRE), t)


def test_prelude_exports():
    for name in ("VoidH", "Exc"):
        assert stdlib.effect_decl(name, PRE).name == name
    assert PRE.lookup(s.HandlerDef, "hExc") is not None


def test_prelude_path_honours_environment(monkeypatch, tmp_path):
    alt = tmp_path / "p.fha"
    alt.write_text("type B : Ty = Bool\n")
    monkeypatch.setenv("FHA_PRELUDE", str(alt))
    assert stdlib.prelude_path() == str(alt)
    assert stdlib.prelude().lookup(s.TypeDef, "B") is not None


def test_coproduct_carrier_is_a_sum():
    cp = stdlib.coprod_hf(stdlib.void_decl(), stdlib.effect_decl("Exc"))
    ck.check_effect(cp, GLOB)
    want = parser.parse_type(r"\(F:Ty -> Ty). \(A:Ty). Empty + (Unit + F A * F A)", PRE)
    assert normal(cp.carrier) == normal(want)


def test_algebraic_operation_functor():
    d = stdlib.alg_op_hfun(s.BOOL, s.UNIT, "PutB")
    ck.check_effect(d, GLOB)
    want = parser.parse_type(r"\(F:Ty -> Ty). \(A:Ty). Bool * (Unit -> A)", PRE)
    assert normal(d.carrier) == normal(want)


def test_row_elaboration_nests_to_the_right():
    row = stdlib.elaborate_row([s.OpSig("a", s.UNIT, s.BOOL), s.OpSig("b", s.BOOL, s.UNIT)], "R")
    ck.check_effect(row, GLOB)
    want = parser.parse_type(
        r"\(F:Ty -> Ty). \(A:Ty). Unit * (Bool -> A) + (Bool * (Unit -> A) + Empty)", PRE)
    assert normal(row.carrier) == normal(want)


def test_operation_call_injects_into_its_summand():
    row = stdlib.EffectRow("R", (s.OpSig("a", s.UNIT, s.BOOL), s.OpSig("b", s.BOOL, s.UNIT)))
    c = row.call("b", s.TT)
    assert isinstance(c, s.Op) and isinstance(c.operand, s.Inr)


def test_thunk_monad_and_functor_check():
    ctx = ck.empty_context(PRE)
    m = stdlib.th_mnd("Exc")
    f = stdlib.fct_of_mnd(m)
    ck.check_term(ctx, f.fmap, ck.fmap_ty(m.monad))
    fields = ck.handler_field_types(stdlib.effect_decl("Exc").carrier, m.monad)
    ck.check_term(ctx, m.ret, fields["ret"])
    ck.check_term(ctx, m.bind, fields["bind"])


def test_thunk_algebra_handles_into_thunks():
    h = stdlib.th_alg(stdlib.effect_decl("Exc"))
    exc = stdlib.exc_package()
    prog = s.Program((s.TermDef("t", s.TTh("Exc", s.BOOL),
                                s.Handle(h, exc.catch(exc.throw(), s.Val(s.TT)), s.BOOL)),))
    ck.check_program(prog, PRE)
    e = ev.Evaluator(PRE, ev.Fuel(10_000))
    e.load(prog)
    nf = e.force(e.const("t"))
    out = e.fold(e.handler_value(s.HandlerRef("hExc")), nf)
    assert ev.render(out) == "inr tt"


def test_exc_package_builds_typed_operations():
    exc = stdlib.exc_package()
    prog = s.Program((s.TermDef("t", s.TTh("Exc", s.BOOL), s.Thunk(exc.throw(result=s.BOOL))),))
    ck.check_program(prog, PRE)


def test_with_void_extends_a_handler():
    cp = stdlib.coprod_hf(stdlib.effect_decl("Exc"), stdlib.void_decl(), "ExcV")
    hexc = GLOB.handlers["hExc"]
    h = stdlib.with_void(hexc, stdlib.effect_decl("Exc"), "ExcV")
    prog = s.Program((s.EffectDef(cp), s.TermDef("t", s.TApp(hexc.monad, s.BOOL),
                                                 s.Handle(h, s.Val(s.TT, Mode.TOTAL), s.BOOL))))
    ck.check_program(prog, PRE)


@pytest.mark.parametrize("sc", scenarios.modular_scenarios(), ids=lambda sc: sc.name)
def test_modular_handlers(sc):
    ck.check_program(sc.program, PRE)
    assert ev.render_outcome(ev.run_program(sc.program, 1_000_000, PRE)) == sc.expected
