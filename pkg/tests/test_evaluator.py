import pytest

from fha import checker as ck
from fha import evaluator as ev
from fha import parser, scenarios, stdlib
from fha import syntax as s
from fha.syntax import Mode

PRE = stdlib.builtin_prelude()


def run(src, fuel=1_000_000):
    p = parser.parse_program(src, PRE)
    ck.check_program(p, PRE)
    return ev.run_program(p, fuel, PRE)


def value(src):
    out = run(src)
    assert isinstance(out, ev.Done), out
    return ev.render(out.value)


@pytest.mark.parametrize("sc", scenarios.hand_written(PRE), ids=lambda sc: sc.name)
def test_hand_written_goldens(sc):
    out = ev.run_program(sc.program, 1_000_000, PRE)
    assert ev.render_outcome(out) == sc.expected


def test_val_and_let():
    assert value("main[total] VoidH : Bool = let x = val tt in val ite x ff tt") == "ff"


def test_rendering():
    assert ev.render(ev.VPair(ev.TT, ev.VInl(ev.UNIT))) == "(tt,inl ())"
    assert ev.render(ev.VInr(ev.VInl(ev.FF))) == "inr (inl ff)"
    assert ev.render_outcome(ev.Timeout(7)) == "timeout(7)"
    assert ev.is_first_order(ev.VPair(ev.TT, ev.UNIT))


def test_exception_goldens():
    for name, want in (("exc_throw", "inl ()"), ("exc_catch", "inr ff"),
                       ("exc_catch_val", "inr tt")):
        assert value(scenarios.corpus_source(name)) == want


def test_hdl_let_witness_differs():
    assert value(scenarios.corpus_source("hdl_let")) == "(tt,ff)"


def test_divergence_times_out_at_the_fuel_limit():
    for fuel in (1, 50, 10_000):
        out = run("main[partial] VoidH : Bool = fix (self. force self)", fuel)
        assert isinstance(out, ev.Timeout) and out.fuel_spent == fuel


def test_countdown_fits_in_small_fuel():
    out = run(scenarios.corpus_source("countdown"), 10_000)
    assert isinstance(out, ev.Done) and out.value == ev.TT


def test_fuel_counts_beta_steps():
    f = ev.Fuel(100)
    p = parser.parse_program(r"main[total] VoidH : Bool = val (\(x:Bool). x) tt", PRE)
    ev.run_program(p, f, PRE)
    assert f.spent == 1


def test_unhandled_operation_is_stuck():
    p = s.Program((s.Main(Mode.TOTAL, "Exc", s.BOOL, stdlib.exc_package().throw(result=s.BOOL)),))
    out = ev.run_program(p, 100, PRE)
    assert isinstance(out, ev.Stuck)


def test_eval_handle_returns_monadic_value():
    exc = stdlib.exc_package()
    out = ev.eval_handle(s.HandlerRef("hExc"), exc.catch(exc.throw(), s.Val(s.TT)),
                         program=PRE)
    assert ev.render(out) == "inr tt"


def test_open_operation_tree():
    exc = stdlib.exc_package()
    nf = ev.eval_comp(None, exc.throw(), program=PRE)
    assert isinstance(nf, ev.NOp)


def test_deep_let_chain():
    c = s.Val(s.TT)
    for _ in range(5000):
        c = s.LetIn(s.Val(s.FF), c)
    p = s.Program((s.Main(Mode.TOTAL, "VoidH", s.BOOL, c),))
    assert ev.run_program(p, 10**6, PRE) == ev.Done(ev.TT)
