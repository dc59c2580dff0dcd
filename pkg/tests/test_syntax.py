import random
from dataclasses import dataclass

import pytest

from fha import syntax as s
from fha.syntax import Mode


def test_shift_type_respects_binders():
    t = s.TForall(s.TY, s.TArrow(s.TVar(0), s.TVar(1)), "a")
    assert s.shift_type(t, 0, 2) == s.TForall(s.TY, s.TArrow(s.TVar(0), s.TVar(3)), "a")


def test_shift_term_under_lambda():
    t = s.Lam(s.BOOL, s.App(s.Var(0), s.Var(1)), "x")
    assert s.shift(t, 0, 1) == s.Lam(s.BOOL, s.App(s.Var(0), s.Var(2)), "x")


def test_shift_cutoff():
    t = s.App(s.Var(0), s.Var(3))
    assert s.shift(t, 1, 5) == s.App(s.Var(0), s.Var(8))


def test_negative_shift_of_bound_index_fails():
    with pytest.raises(s.InternalError):
        s.shift(s.Var(0), 0, -1)


def test_beta_substitution_example():
    # (\y. x y)[x := \z. z] with x free at 0
    body = s.Lam(s.BOOL, s.App(s.Var(1), s.Var(0)), "y")
    idz = s.Lam(s.BOOL, s.Var(0), "z")
    assert s.substitute(body, idz, 0) == s.Lam(s.BOOL, s.App(idz, s.Var(0)), "y")


def test_substitution_avoids_capture():
    # (\y. x)[x := y_free]: the free y must not be captured
    body = s.Lam(s.BOOL, s.Var(1), "y")
    assert s.substitute(body, s.Var(0), 0) == s.Lam(s.BOOL, s.Var(1), "y")


def test_type_substitution_into_term_annotations():
    t = s.TyLam(s.TY, s.Lam(s.TArrow(s.TVar(0), s.TVar(1)), s.Var(0), "f"), "b")
    out = s.substitute(t, s.BOOL, 0)
    assert out == s.TyLam(s.TY, s.Lam(s.TArrow(s.TVar(0), s.BOOL), s.Var(0), "f"), "b")


def test_substitution_into_computations():
    c = s.LetIn(s.Val(s.Var(0)), s.Val(s.Pair(s.Var(0), s.Var(1))))
    out = s.substitute(c, s.TT, 0)
    assert out == s.LetIn(s.Val(s.TT), s.Val(s.Pair(s.Var(0), s.TT)))


def test_name_hints_do_not_affect_equality():
    assert s.Lam(s.BOOL, s.Var(0), "x") == s.Lam(s.BOOL, s.Var(0), "y")
    assert s.TForall(s.TY, s.TVar(0), "a") == s.TForall(s.TY, s.TVar(0), "b")


def test_free_variables():
    t = s.Lam(s.BOOL, s.App(s.Var(0), s.Var(2)), "x")
    assert s.free_term_vars(t) == {1}
    assert s.free_type_vars(s.TForall(s.TY, s.TApp(s.TVar(0), s.TVar(4)))) == {3}


def test_with_mode_retags_every_node():
    c = s.LetIn(s.Val(s.TT), s.Force(s.Var(0)))
    p = s.with_mode(c, Mode.PARTIAL)
    assert set(s.comp_modes(p)) == {Mode.PARTIAL}


# ---------------------------------------------------- named oracle


@dataclass(frozen=True)
class NVar:
    name: str


@dataclass(frozen=True)
class NLam:
    name: str
    body: object


@dataclass(frozen=True)
class NApp:
    fn: object
    arg: object


def to_named(t, scope=(), free=lambda i: f"f{i}"):
    match t:
        case s.Var(i):
            return NVar(scope[i] if i < len(scope) else free(i - len(scope)))
        case s.Lam(_, body):
            name = f"b{len(scope)}"
            return NLam(name, to_named(body, (name,) + scope, free))
        case s.App(f, a):
            return NApp(to_named(f, scope, free), to_named(a, scope, free))
    raise TypeError(t)


def from_named(t, scope=(), free=lambda n: int(n[1:])):
    match t:
        case NVar(n):
            if n in scope:
                return s.Var(scope.index(n))
            return s.Var(len(scope) + free(n))
        case NLam(n, body):
            return s.Lam(s.BOOL, from_named(body, (n,) + scope, free), n)
        case NApp(f, a):
            return s.App(from_named(f, scope, free), from_named(a, scope, free))
    raise TypeError(t)


def named_free(t):
    match t:
        case NVar(n):
            return {n}
        case NLam(n, b):
            return named_free(b) - {n}
        case NApp(f, a):
            return named_free(f) | named_free(a)


_COUNTER = [0]


def named_subst(t, x, r):
    """Textbook capture-avoiding substitution with renaming."""
    match t:
        case NVar(n):
            return r if n == x else t
        case NApp(f, a):
            return NApp(named_subst(f, x, r), named_subst(a, x, r))
        case NLam(n, b):
            if n == x:
                return t
            if n in named_free(r):
                _COUNTER[0] += 1
                fresh = f"r{_COUNTER[0]}"
                b = named_subst(b, n, NVar(fresh))
                n = fresh
            return NLam(n, named_subst(b, x, r))


def random_term(rng, depth, bound=0, free=3):
    k = rng.randrange(3) if depth > 0 else 0
    if k == 0:
        return s.Var(rng.randrange(bound + free))
    if k == 1:
        return s.Lam(s.BOOL, random_term(rng, depth - 1, bound + 1, free), "x")
    return s.App(random_term(rng, depth - 1, bound, free), random_term(rng, depth - 1, bound, free))


def test_substitution_matches_named_oracle():
    rng = random.Random(1234)
    for _ in range(200):
        t = random_term(rng, 5)
        r = random_term(rng, 3)
        got = s.substitute(t, r, 0)
        named = named_subst(to_named(t), "f0", to_named(r, free=lambda i: f"f{i + 1}"))
        # in the result, free f(i) with i >= 1 is index i - 1
        want = from_named(named, free=lambda n: int(n[1:]) - 1)
        assert got == want, (t, r)
