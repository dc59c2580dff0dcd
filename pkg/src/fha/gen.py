"""Random well-typed programs, built type-directed so they check by construction.

Generated terms live over the prelude plus ``GEN_BASE`` (a boolean state row
``St`` with its handler ``hSt``).  Every generated computation is total.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from .syntax import Mode
from .templates import annotate

GEN_BASE_SOURCE = r"""
effect St { get : Unit ~> Bool; put : Bool ~> Unit; }

handler hSt : St = {
  M = \(a:Ty). Bool -> a * Bool;
  ret = /\(a:Ty). \(x:a). \(s:Bool). (x, s);
  bind = /\(a:Ty). /\(b:Ty). \(m: Bool -> a * Bool). \(k: a -> Bool -> b * Bool).
         \(s:Bool). k (fst (m s)) (snd (m s));
  malg = /\(a:Ty). \(o: Unit * (Bool -> a) + (Bool * (Unit -> a) + Empty)).
         case o { inl g -> \(s:Bool). (snd g s, s) ;
                  inr r -> case r { inl p -> \(s:Bool). (snd p (), fst p) ;
                                    inr e -> absurd[Bool -> a * Bool] e } }
}
"""

EFFECTS = ("VoidH", "Exc", "St")
HANDLERS = {"Exc": "hExc", "St": "hSt"}


def gen_base(prelude: s.Program) -> s.Program:
    from .parser import parse_program
    return parse_program(GEN_BASE_SOURCE, prelude, "<gen-base>")


def church(n: int) -> s.Term:
    """``/\\a. \\f. \\x. f (... (f x))``."""
    body: s.Term = s.Var(0)
    for _ in range(n):
        body = s.App(s.Var(1), body)
    a = s.TVar(0)
    return s.TyLam(s.TY, s.Lam(s.TArrow(a, a), s.Lam(a, body, "x"), "f"), "a")


POLY_ID = s.TyLam(s.TY, s.Lam(s.TVar(0), s.Var(0), "x"), "a")
NOT = s.Lam(s.BOOL, s.Ite(s.Var(0), s.FF, s.TT), "b")


def get_op(mode: Mode = Mode.TOTAL) -> tuple:
    """Operand and result type of ``get ()`` in ``St``."""
    return s.Inl(None, s.Pair(s.UNIT_V, s.Lam(s.BOOL, s.Var(0), "x"))), s.BOOL


def put_op(b: s.Term) -> tuple:
    return s.Inr(None, s.Inl(None, s.Pair(b, s.Lam(s.UNIT, s.Var(0), "x")))), s.UNIT


@dataclass
class Gen:
    """A seeded generator.  ``vars`` lists term variable types, innermost first."""
    rng: random.Random = field(default_factory=random.Random)
    depth: int = 3

    @classmethod
    def seeded(cls, seed: int, depth: int = 3) -> "Gen":
        return cls(random.Random(seed), depth)

    def chance(self, p: float) -> bool:
        return self.rng.random() < p

    # ------------------------------------------------------------ types

    def type(self, depth: Optional[int] = None, arrows: bool = True) -> s.TypeExpr:
        d = self.depth - 1 if depth is None else depth
        if d <= 0 or self.chance(0.4):
            return self.rng.choice([s.BOOL, s.BOOL, s.UNIT])
        k = self.rng.randrange(4 if arrows else 3)
        a, b = self.type(d - 1, arrows), self.type(d - 1, arrows)
        return (s.TProd, s.TSum, s.TSum, s.TArrow)[k](a, b) if k < 3 else s.TArrow(a, b)

    # ------------------------------------------------------------ terms

    def term(self, ty: s.TypeExpr, vars: tuple = (), depth: Optional[int] = None) -> s.Term:
        d = self.depth if depth is None else depth
        hits = [i for i, t in enumerate(vars) if t == ty]
        if hits and self.chance(0.3):
            return s.Var(self.rng.choice(hits))
        if d <= 0:
            return self.leaf(ty, vars)
        opts = [self._intro]
        if isinstance(ty, (s.TBool, s.TProd, s.TSum)):
            opts += [self._ite]
        opts += [self._elim_var, self._case, self._redex, self._poly]
        if ty == s.BOOL:
            opts += [self._church, self._handled, self._handled]
        return self.rng.choice(opts)(ty, vars, d)

    def leaf(self, ty: s.TypeExpr, vars: tuple = ()) -> s.Term:
        hits = [i for i, t in enumerate(vars) if t == ty]
        if hits and self.chance(0.5):
            return s.Var(self.rng.choice(hits))
        match ty:
            case s.TBool():
                return self.rng.choice([s.TT, s.FF])
            case s.TUnit():
                return s.UNIT_V
            case s.TProd(a, b):
                return s.Pair(self.leaf(a, vars), self.leaf(b, vars))
            case s.TSum(a, b):
                if self.chance(0.5):
                    return s.Inl(None, self.leaf(a, vars))
                return s.Inr(None, self.leaf(b, vars))
            case s.TArrow(a, b):
                return s.Lam(a, self.leaf(b, (a,) + vars), "x")
        raise ValueError(f"no closed leaf for {ty!r}")

    def _intro(self, ty, vars, d):
        match ty:
            case s.TBool():
                return self.rng.choice([s.TT, s.FF])
            case s.TUnit():
                return s.UNIT_V
            case s.TProd(a, b):
                return s.Pair(self.term(a, vars, d - 1), self.term(b, vars, d - 1))
            case s.TSum(a, b):
                if self.chance(0.5):
                    return s.Inl(None, self.term(a, vars, d - 1))
                return s.Inr(None, self.term(b, vars, d - 1))
            case s.TArrow(a, b):
                return s.Lam(a, self.term(b, (a,) + vars, d - 1), "x")
        return self.leaf(ty, vars)

    def _ite(self, ty, vars, d):
        return s.Ite(self.term(s.BOOL, vars, d - 1), self.term(ty, vars, d - 1),
                     self.term(ty, vars, d - 1))

    def _elim_var(self, ty, vars, d):
        """Use a variable: apply a function or project a pair reaching ``ty``."""
        opts = []
        for i, t in enumerate(vars):
            if isinstance(t, s.TArrow) and t.cod == ty:
                opts.append(lambda i=i, t=t: s.App(s.Var(i), self.term(t.dom, vars, d - 1)))
            if isinstance(t, s.TProd) and t.left == ty:
                opts.append(lambda i=i: s.Fst(s.Var(i)))
            if isinstance(t, s.TProd) and t.right == ty:
                opts.append(lambda i=i: s.Snd(s.Var(i)))
        if not opts:
            return self._intro(ty, vars, d)
        return self.rng.choice(opts)()

    def _scrutinee(self, vars, d) -> tuple:
        sums = [(i, t) for i, t in enumerate(vars) if isinstance(t, s.TSum)]
        if sums and self.chance(0.5):
            i, t = self.rng.choice(sums)
            return s.Var(i), t
        st = s.TSum(self.type(1), self.type(1))
        inj = s.Inl if self.chance(0.5) else s.Inr
        return inj(st, self.term(st.left if inj is s.Inl else st.right, vars, d - 1)), st

    def _case(self, ty, vars, d):
        scrut, st = self._scrutinee(vars, d)
        return s.Case(scrut, self.term(ty, (st.left,) + vars, d - 1),
                      self.term(ty, (st.right,) + vars, d - 1), "x", "y")

    def _redex(self, ty, vars, d):
        a = self.type(1)
        fn = s.Lam(a, self.term(ty, (a,) + vars, d - 1), "x")
        return s.App(annotate(fn, s.TArrow(a, ty)), self.term(a, vars, d - 1))

    def _poly(self, ty, vars, d):
        return s.App(s.TyApp(POLY_ID, ty), self.term(ty, vars, d - 1))

    def _church(self, ty, vars, d):
        n = self.rng.randrange(4)
        return s.App(s.App(s.TyApp(church(n), s.BOOL), NOT), self.term(s.BOOL, vars, d - 1))

    def _handled(self, ty, vars, d):
        """A boolean read off a handled computation."""
        eff = self.rng.choice(["Exc", "St", "VoidH"])
        c = self.comp(eff, s.BOOL, vars, d - 1)
        if eff == "VoidH":
            return self._force_void(c)
        if eff == "Exc":
            h = s.Handle(s.HandlerRef("hExc"), c, s.BOOL)
            return s.Case(h, self.term(s.BOOL, (s.UNIT,) + vars, d - 1), s.Var(0), "u", "x")
        h = s.Handle(s.HandlerRef("hSt"), c, s.BOOL)
        proj = s.Fst if self.chance(0.7) else s.Snd
        return proj(s.App(h, self.term(s.BOOL, vars, d - 1)))

    def _force_void(self, c: s.Comp) -> s.Term:
        """Run an operation-free computation inside a term with the exception handler."""
        h = s.Handle(s.HandlerRef("hExc"), s.Force(s.Thunk(c)), s.BOOL)
        return s.Case(h, s.FF, s.Var(0), "u", "x")

    # ------------------------------------------------------------ computations

    def comp(self, effect: str, ty: s.TypeExpr, vars: tuple = (),
             depth: Optional[int] = None) -> s.Comp:
        d = self.depth if depth is None else depth
        if d <= 0:
            return s.Val(self.term(ty, vars, 0))
        opts = [self._val, self._let, self._let, self._force]
        if effect == "Exc":
            opts += [self._throw, self._catch, self._catch]
        if effect == "St":
            opts += [self._get, self._put]
        return self.rng.choice(opts)(effect, ty, vars, d)

    def _val(self, e, ty, vars, d):
        return s.Val(self.term(ty, vars, d - 1))

    def _let(self, e, ty, vars, d):
        a = self.type(1, arrows=False)
        name = f"v{len(vars)}"
        return s.LetIn(self.comp(e, a, vars, d - 1), self.comp(e, ty, (a,) + vars, d - 1), a,
                       Mode.TOTAL, name)

    def _force(self, e, ty, vars, d):
        return s.Force(s.Thunk(self.comp(e, ty, vars, d - 1)))

    def _throw(self, e, ty, vars, d):
        return s.Op(s.Inl(None, s.UNIT_V), s.Val(s.Var(0)), ty)

    def _catch(self, e, ty, vars, d):
        body, rec = self.comp(e, ty, vars, d - 1), self.comp(e, ty, vars, d - 1)
        return s.Op(s.Inr(None, s.Pair(s.Thunk(body), s.Thunk(rec))), s.Val(s.Var(0)), ty)

    def _get(self, e, ty, vars, d):
        p, x = get_op()
        return s.Op(p, self.comp(e, ty, (x,) + vars, d - 1), x, Mode.TOTAL, "g")

    def _put(self, e, ty, vars, d):
        p, x = put_op(self.term(s.BOOL, vars, d - 1))
        return s.Op(p, self.comp(e, ty, (x,) + vars, d - 1), x, Mode.TOTAL, "u")

    def operand(self, effect: str, vars: tuple = (), depth: int = 2) -> tuple:
        """A random ``op`` operand at ``effect`` and its result type."""
        if effect == "Exc":
            if self.chance(0.4):
                return s.Inl(None, s.UNIT_V), self.type(1, arrows=False)
            x = self.type(1, arrows=False)
            body, rec = self.comp("Exc", x, vars, depth), self.comp("Exc", x, vars, depth)
            return s.Inr(None, s.Pair(s.Thunk(body), s.Thunk(rec))), x
        if effect == "St":
            return get_op() if self.chance(0.5) else put_op(self.term(s.BOOL, vars, depth))
        raise ValueError(f"effect {effect!r} has no operations")

    # ------------------------------------------------------------ programs

    def main_comp(self) -> s.Comp:
        return self.comp("VoidH", s.BOOL)

    def program(self, base: s.Program) -> s.Program:
        """``base`` plus a total boolean ``main`` at VoidH."""
        main = s.Main(Mode.TOTAL, "VoidH", s.BOOL, self.main_comp())
        return s.Program(tuple(base.decls) + (main,))

    # ------------------------------------------------------------ forall a. a -> a

    def id_inhabitant(self, depth: int = 3) -> s.Term:
        """A closed term of ``forall (a:Ty). a -> a`` (never just the identity shape)."""
        a = s.TVar(0)
        return s.TyLam(s.TY, s.Lam(a, self._poly_body((a,), depth), "x"), "a")

    def _poly_body(self, vars: tuple, d: int) -> s.Term:
        """A term of type ``a`` in the context ``vars`` (``vars[i]`` types ``Var(i)``)."""
        a = s.TVar(0)
        if d <= 0:
            return s.Var(self.rng.choice([i for i, t in enumerate(vars) if t == a]))
        k = self.rng.randrange(8)
        sub = lambda *extra: self._poly_body(extra + vars, d - 1)  # noqa: E731
        match k:
            case 0:
                return s.App(annotate(s.Lam(a, sub(a), "y"), s.TArrow(a, a)), sub())
            case 1:
                return s.Ite(self.term(s.BOOL, vars, 1), sub(), sub())
            case 2:
                return s.Fst(annotate(s.Pair(sub(), self.term(s.BOOL, vars, 1)), s.TProd(a, s.BOOL)))
            case 3:
                return s.Snd(annotate(s.Pair(self.term(s.BOOL, vars, 1), sub()), s.TProd(s.BOOL, a)))
            case 4:
                scrut = s.Inl(s.TSum(s.BOOL, s.UNIT), s.TT) if self.chance(0.5) \
                    else s.Inr(s.TSum(s.BOOL, s.UNIT), s.UNIT_V)
                return s.Case(scrut, sub(s.BOOL), sub(s.UNIT), "l", "r")
            case 5:
                return s.App(s.TyApp(POLY_ID, a), sub())
            case 6:
                n = self.rng.randrange(4)
                return s.App(s.App(s.TyApp(church(n), a), s.Lam(a, s.Var(0), "y")), sub())
            case _:
                h = s.Handle(s.HandlerRef("hExc"), s.Val(sub()), a)
                return s.Case(h, sub(s.UNIT), s.Var(0), "u", "y")

