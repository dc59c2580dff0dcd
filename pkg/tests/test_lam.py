import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fha import lam as L
from fha._stack import deep


def closed_terms(max_depth=6):
    def build(depth, bound):
        options = []
        if bound:
            options.append(st.integers(0, bound - 1).map(L.LVar))
        if depth > 0:
            options.append(build(depth - 1, bound + 1).map(lambda b: L.LLam(b, "x")))
            if bound:
                options.append(st.tuples(build(depth - 1, bound), build(depth - 1, bound))
                               .map(lambda p: L.LApp(*p)))
        return st.one_of(*options)

    return st.integers(1, max_depth).flatmap(lambda d: build(d, 0))


def random_lam(rng, depth, bound=0):
    if bound and (depth <= 0 or rng.random() < 0.3):
        return L.LVar(rng.randrange(bound))
    if not bound or rng.random() < 0.4:
        return L.LLam(random_lam(rng, depth - 1, bound + 1), rng.choice("xyzf"))
    return L.LApp(random_lam(rng, depth - 1, bound), random_lam(rng, depth - 1, bound))


def test_identity_applied():
    t = L.parse_lam(r"(\x. x) (\y. y)")
    assert L.normalize(t) == L.parse_lam(r"\y. y")


def test_normal_order_discards_divergent_argument():
    t = L.app(L.parse_lam(r"\x. \y. y"), L.OMEGA)
    assert L.normalize(t) == L.parse_lam(r"\y. y")


def test_reduction_under_binders():
    t = L.parse_lam(r"\x. (\f. f x) (\y. y)")
    assert L.normalize(t) == L.parse_lam(r"\x. x")


def test_omega_exceeds_budget():
    with pytest.raises(L.BudgetExceeded) as err:
        L.normalize(L.OMEGA, 500)
    assert err.value.steps == 500


def test_step_count_is_exact():
    t = L.parse_lam(r"(\x. x) ((\y. y) (\z. z))")
    nf, steps = L.normalize_with_steps(t)
    assert nf == L.parse_lam(r"\z. z") and steps == 2


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        L.normalize(L.parse_lam(r"\x. x"), 0)
    with pytest.raises(ValueError):
        L.ReduceBudget(0)


def test_church_booleans_decode():
    assert L.decode_bool(L.church_bool(True)) == "tt"
    assert L.decode_bool(L.church_bool(False)) == "ff"
    assert L.decode_bool(L.parse_lam(r"\x. x")) == "unknown"
    assert L.decode_bool(L.OMEGA, 100) == "unknown"


def test_y_is_a_fixpoint_up_to_conversion():
    f = L.parse_lam(r"\g. \n. n")
    assert L.convertible(L.app(L.Y, f), L.app(f, L.app(L.Y, f)))


def test_convertible_distinguishes_booleans():
    assert not L.convertible(L.church_bool(True), L.church_bool(False))


def test_free_constants_parse_and_print():
    t = L.parse_lam(r"\x. K x", free=["K"])
    assert isinstance(t.body.fn, L.LFreeConst)
    assert L.parse_lam(L.print_lam(t), free=["K"]) == t


def test_parse_errors():
    with pytest.raises(L.LamParseError):
        L.parse_lam(r"\x. y")
    with pytest.raises(L.LamParseError):
        L.parse_lam(r"(\x. x")


def test_comments_are_skipped():
    assert L.parse_lam("-- a comment\n\\x. x") == L.parse_lam(r"\x. x")


def test_printer_renames_only_on_capture():
    t = L.LLam(L.LLam(L.LApp(L.LVar(1), L.LVar(0)), "x"), "x")
    text = L.print_lam(t)
    assert L.parse_lam(text) == t
    assert text.count("x") >= 2


def test_random_print_parse_round_trips():
    rng = random.Random(7)
    for _ in range(500):
        t = random_lam(rng, 7)
        assert L.parse_lam(L.print_lam(t)) == t


def test_deep_terms_do_not_overflow():
    t = L.LVar(0)
    for _ in range(20_000):
        t = L.LApp(L.parse_lam(r"\y. y"), t)
    t = L.LLam(t, "x")
    assert L.normalize(t) == L.parse_lam(r"\x. x")
    back = L.parse_lam(L.print_lam(t))
    # structural equality recurses, so compare on a big stack too
    assert deep(lambda: back == t)()


@settings(max_examples=200, deadline=None)
@given(closed_terms())
def test_print_parse_property(t):
    assert L.parse_lam(L.print_lam(t)) == t


@settings(max_examples=200, deadline=None)
@given(closed_terms(5))
def test_normal_forms_are_idempotent(t):
    try:
        nf = L.normalize(t, 2000)
    except L.BudgetExceeded:
        return
    assert L.normalize(nf, 2000) == nf
    assert L.closed(nf)


@settings(max_examples=100, deadline=None)
@given(closed_terms(4), closed_terms(4))
def test_beta_redex_converts_to_its_contractum(t, u):
    # (\x. \y. x) t u  ~  t
    k = L.parse_lam(r"\x. \y. x")
    try:
        assert L.convertible(L.app(k, t, u), t, 2000)
    except L.BudgetExceeded:
        pass
