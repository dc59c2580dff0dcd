"""Big-step call-by-value evaluation with a fuel budget.

Computations evaluate to ``NVal v`` or ``NOp(p, k)`` where ``k`` is a host
continuation; ``let`` pushes itself into such continuations (let-op), and a
handler folds the resulting operation tree (hdl-val, hdl-op).  Type
abstractions are erased: a type application just runs the suspended body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import syntax as s
from ._stack import deep

# ------------------------------------------------------------------ values


@dataclass(frozen=True)
class VTt:
    pass


@dataclass(frozen=True)
class VFf:
    pass


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True)
class VPair:
    first: "Value"
    second: "Value"


@dataclass(frozen=True)
class VInl:
    value: "Value"


@dataclass(frozen=True)
class VInr:
    value: "Value"


@dataclass(frozen=True, eq=False)
class VClosure:
    env: "Env"
    body: s.Term


@dataclass(frozen=True, eq=False)
class VTyClosure:
    env: "Env"
    body: s.Term


@dataclass(frozen=True, eq=False)
class VThunk:
    env: "Env"
    comp: s.Comp


@dataclass(frozen=True, eq=False)
class VHost:
    """A host function used for runtime-built maps and callbacks."""
    fn: Callable[["Value"], "Value"]
    name: str = "host"


@dataclass(frozen=True, eq=False)
class VHandler:
    ret: "Value"
    bind: "Value"
    malg: "Value"
    hmap: "Value"
    effect: str = ""


Value = Union[VTt, VFf, VUnit, VPair, VInl, VInr, VClosure, VTyClosure, VThunk, VHost, VHandler]
Env = Optional[tuple]  # cons list (value, rest)

TT, FF, UNIT = VTt(), VFf(), VUnit()


def env_of(*values: Value) -> Env:
    """Environment with ``values[0]`` at index 0."""
    env = None
    for v in reversed(values):
        env = (v, env)
    return env


# ----------------------------------------------------------- normal forms


@dataclass(frozen=True, eq=False)
class NVal:
    value: Value


@dataclass(frozen=True, eq=False)
class NOp:
    operand: Value
    cont: Callable[[Value], "CompNF"]


CompNF = Union[NVal, NOp]


# --------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Done:
    value: Value


@dataclass(frozen=True)
class Timeout:
    fuel_spent: int


@dataclass(frozen=True)
class Stuck:
    message: str


Outcome = Union[Done, Timeout, Stuck]


class StuckError(Exception):
    """Evaluation reached a configuration with no rule (only on unchecked input)."""


class OutOfFuel(Exception):
    def __init__(self, spent: int):
        super().__init__(f"out of fuel after {spent} steps")
        self.spent = spent


@dataclass
class Fuel:
    """Step budget: one unit per beta step, handler fold step and fix unfolding."""
    remaining: int = 1_000_000
    spent: int = 0

    def tick(self) -> None:
        if self.remaining <= 0:
            raise OutOfFuel(self.spent)
        self.remaining -= 1
        self.spent += 1


# -------------------------------------------------------------- rendering


def render(v: Value) -> str:
    match v:
        case VTt():
            return "tt"
        case VFf():
            return "ff"
        case VUnit():
            return "()"
        case VPair(a, b):
            return f"({render(a)},{render(b)})"
        case VInl(a):
            return f"inl {_render_arg(a)}"
        case VInr(a):
            return f"inr {_render_arg(a)}"
        case VClosure() | VTyClosure() | VHost():
            return "<function>"
        case VThunk():
            return "<thunk>"
        case VHandler():
            return "<handler>"
    raise s.InternalError(f"not a value: {v!r}")


def _render_arg(v: Value) -> str:
    out = render(v)
    return f"({out})" if isinstance(v, (VInl, VInr)) else out


def render_outcome(o: Outcome) -> str:
    match o:
        case Done(v):
            return render(v)
        case Timeout(n):
            return f"timeout({n})"
        case Stuck(msg):
            return f"stuck: {msg}"
    raise s.InternalError(f"not an outcome: {o!r}")


def is_first_order(v: Value) -> bool:
    match v:
        case VTt() | VFf() | VUnit():
            return True
        case VPair(a, b):
            return is_first_order(a) and is_first_order(b)
        case VInl(a) | VInr(a):
            return is_first_order(a)
    return False


# -------------------------------------------------------------- machine


def _lookup(env: Env, i: int) -> Value:
    while i:
        if env is None:
            raise StuckError("unbound variable")
        env = env[1]
        i -= 1
    if env is None:
        raise StuckError("unbound variable")
    return env[0]


# Built-in thunk functor map: thunk (let a = force ma in val (f a)), with
# environment (f, ma).
_TH_FMAP_BODY = s.LetIn(s.Force(s.Var(1)), s.Val(s.App(s.Var(1), s.Var(0))))


class Evaluator:
    """Evaluates closed core syntax against a table of top-level declarations."""

    def __init__(self, program: Optional[s.Program] = None, fuel: Optional[Fuel] = None):
        self.fuel = fuel or Fuel()
        self.terms: dict[str, s.Term] = {}
        self.handlers: dict[str, s.HandlerExpr] = {}
        self.effects: dict[str, s.EffectDecl] = {}
        self._const_cache: dict[str, Value] = {}
        self._handler_cache: dict[int, tuple] = {}
        self._hmap_cache: dict[str, Value] = {}
        if program is not None:
            self.load(program)

    def load(self, program: s.Program) -> None:
        for d in program.decls:
            if isinstance(d, s.TermDef):
                self.terms[d.name] = d.body
            elif isinstance(d, s.HandlerDef):
                self.handlers[d.name] = d.handler
            elif isinstance(d, s.EffectDef):
                self.effects[d.name] = d.decl

    # ---------------------------------------------------------- terms

    def eval_term(self, env: Env, t: s.Term) -> Value:
        cls = type(t)
        if cls is s.Var:
            return _lookup(env, t.index)
        if cls is s.App:
            f = self.eval_term(env, t.fn)
            return self.apply(f, self.eval_term(env, t.arg))
        if cls is s.Lam:
            return VClosure(env, t.body)
        if cls is s.TyApp:
            return self.inst(self.eval_term(env, t.fn))
        if cls is s.TyLam:
            return VTyClosure(env, t.body)
        if cls is s.Const:
            return self.const(t.name)
        if cls is s.Tt:
            return TT
        if cls is s.Ff:
            return FF
        if cls is s.UnitV:
            return UNIT
        if cls is s.Ite:
            c = self.eval_term(env, t.cond)
            if isinstance(c, VTt):
                return self.eval_term(env, t.then)
            if isinstance(c, VFf):
                return self.eval_term(env, t.else_)
            raise StuckError("ite on a non-boolean")
        if cls is s.Pair:
            return VPair(self.eval_term(env, t.first), self.eval_term(env, t.second))
        if cls is s.Fst or cls is s.Snd:
            p = self.eval_term(env, t.pair)
            if not isinstance(p, VPair):
                raise StuckError("projection from a non-pair")
            return p.first if cls is s.Fst else p.second
        if cls is s.Inl:
            return VInl(self.eval_term(env, t.value))
        if cls is s.Inr:
            return VInr(self.eval_term(env, t.value))
        if cls is s.Case:
            v = self.eval_term(env, t.scrutinee)
            if isinstance(v, VInl):
                return self.eval_term((v.value, env), t.left)
            if isinstance(v, VInr):
                return self.eval_term((v.value, env), t.right)
            raise StuckError("case on a non-sum")
        if cls is s.Absurd:
            self.eval_term(env, t.value)
            raise StuckError("absurd reached")
        if cls is s.Thunk or cls is s.PThunk:
            return VThunk(env, t.comp)
        if cls is s.Handle:
            h = self.handler_value(t.handler)
            return self.fold(h, self.eval_comp(env, t.comp))
        raise s.InternalError(f"not a term: {t!r}")

    def apply(self, f: Value, a: Value) -> Value:
        if isinstance(f, VClosure):
            self.fuel.tick()
            return self.eval_term((a, f.env), f.body)
        if isinstance(f, VHost):
            return f.fn(a)
        raise StuckError("application of a non-function")

    def inst(self, f: Value) -> Value:
        """Type application: types are erased, so run the suspended body."""
        if isinstance(f, VTyClosure):
            self.fuel.tick()
            return self.eval_term(f.env, f.body)
        if isinstance(f, VHost):
            return f
        raise StuckError("type application of a non-polymorphic value")

    def const(self, name: str) -> Value:
        v = self._const_cache.get(name)
        if v is None:
            body = self.terms.get(name)
            if body is None:
                raise StuckError(f"unknown term {name!r}")
            v = self.eval_term(None, body)
            self._const_cache[name] = v
        return v

    # ---------------------------------------------------------- comps

    def eval_comp(self, env: Env, c: s.Comp) -> CompNF:
        while True:
            cls = type(c)
            if cls is s.Val:
                return NVal(self.eval_term(env, c.term))
            if cls is s.LetIn:
                r = self.eval_comp(env, c.bound)
                if isinstance(r, NVal):
                    env, c = (r.value, env), c.body
                    continue
                return self._let_op(r, env, c.body)
            if cls is s.Op:
                p = self.eval_term(env, c.operand)
                body = c.body
                return NOp(p, lambda x, env=env, body=body: self.eval_comp((x, env), body))
            if cls is s.Force:
                v = self.eval_term(env, c.term)
                if not isinstance(v, VThunk):
                    raise StuckError("force of a non-thunk")
                env, c = v.env, v.comp
                continue
            if cls is s.Fix:
                self.fuel.tick()
                env, c = (VThunk(env, c), env), c.body
                continue
            raise s.InternalError(f"not a computation: {c!r}")

    def _let_op(self, r: NOp, env: Env, body: s.Comp) -> NOp:
        k = r.cont

        def cont(x: Value) -> CompNF:
            nf = k(x)
            if isinstance(nf, NVal):
                return self.eval_comp((nf.value, env), body)
            return self._let_op(nf, env, body)

        return NOp(r.operand, cont)

    def force(self, v: Value) -> CompNF:
        if not isinstance(v, VThunk):
            raise StuckError("force of a non-thunk")
        return self.eval_comp(v.env, v.comp)

    # ---------------------------------------------------------- handlers

    def handler_value(self, h: s.HandlerLike) -> VHandler:
        if isinstance(h, s.HandlerRef):
            hx = self.handlers.get(h.name)
            if hx is None:
                raise StuckError(f"unknown handler {h.name!r}")
            h = hx
        hit = self._handler_cache.get(id(h))
        if hit is not None and hit[0] is h:
            return hit[1]
        v = VHandler(self.eval_term(None, h.ret), self.eval_term(None, h.bind),
                     self.eval_term(None, h.malg), self.hmap_value(h.effect), h.effect)
        self._handler_cache[id(h)] = (h, v)
        return v

    def hmap_value(self, effect: str) -> Value:
        v = self._hmap_cache.get(effect)
        if v is None:
            decl = self.effects.get(effect)
            if decl is None:
                raise StuckError(f"unknown effect {effect!r}")
            v = self.eval_term(None, decl.hmap)
            self._hmap_cache[effect] = v
        return v

    def thunk_fmap(self) -> Value:
        return VHost(lambda f: VHost(lambda ma: VThunk((f, (ma, None)), _TH_FMAP_BODY),
                                     "fmap-th/1"), "fmap-th")

    def monad_fmap(self, h: VHandler) -> Value:
        def fmap(f: Value) -> Value:
            def on(ma: Value) -> Value:
                k = VHost(lambda a: self.apply(self.inst(h.ret), self.apply(f, a)), "ret-f")
                return self.apply(self.apply(self.inst(self.inst(h.bind)), ma), k)
            return VHost(on, "fmap-M/1")
        return VHost(fmap, "fmap-M")

    def fold(self, h: VHandler, nf: CompNF) -> Value:
        """``hdl h``: fold an operation tree into the handler's monad."""
        if isinstance(nf, NVal):
            self.fuel.tick()
            return self.apply(self.inst(h.ret), nf.value)
        self.fuel.tick()
        sigma = VHost(lambda c: self.fold(h, self.force(c)), "hdl")
        hm = self.inst(h.hmap)
        hm = self.inst(self.apply(hm, self.thunk_fmap()))
        hm = self.apply(self.apply(hm, self.monad_fmap(h)), sigma)
        p2 = self.apply(self.inst(hm), nf.operand)
        m = self.apply(self.inst(h.malg), p2)
        k = nf.cont
        rest = VHost(lambda a: self.fold(h, k(a)), "hdl-k")
        return self.apply(self.apply(self.inst(self.inst(h.bind)), m), rest)


# ------------------------------------------------------------- entry points


def _guard(fn, fuel: Fuel):
    try:
        return fn()
    except OutOfFuel:
        return Timeout(fuel.spent)
    except StuckError as e:
        return Stuck(str(e))
    except RecursionError:
        return Stuck("recursion depth exceeded")


def eval_term(env: Env, t: s.Term, fuel: Optional[Fuel] = None,
              program: Optional[s.Program] = None) -> Union[Value, Timeout, Stuck]:
    fuel = fuel or Fuel()
    ev = Evaluator(program, fuel)
    return _guard(lambda: ev.eval_term(env, t), fuel)


def eval_comp(env: Env, c: s.Comp, fuel: Optional[Fuel] = None,
              program: Optional[s.Program] = None) -> Union[CompNF, Timeout, Stuck]:
    fuel = fuel or Fuel()
    ev = Evaluator(program, fuel)
    return _guard(lambda: ev.eval_comp(env, c), fuel)


def eval_handle(h: s.HandlerLike, c: s.Comp, fuel: Optional[Fuel] = None,
                program: Optional[s.Program] = None, env: Env = None
                ) -> Union[Value, Timeout, Stuck]:
    """Handle the closed computation ``c`` with ``h`` and return the monadic value."""
    fuel = fuel or Fuel()
    ev = Evaluator(program, fuel)
    return _guard(lambda: ev.fold(ev.handler_value(h), ev.eval_comp(env, c)), fuel)


def _run_main(ev: Evaluator, main: s.Main) -> Outcome:
    nf = ev.eval_comp(None, main.comp)
    if isinstance(nf, NOp):
        return Stuck("unhandled operation at top level")
    return Done(nf.value)


@deep
def run_program(p: s.Program, fuel: Union[int, Fuel] = 1_000_000,
                prelude: Optional[s.Program] = None) -> Outcome:
    """Evaluate the program's ``main``; ``prelude`` declarations are linked first."""
    fuel = fuel if isinstance(fuel, Fuel) else Fuel(int(fuel))
    main = p.main
    if main is None:
        return Stuck("program has no main")
    ev = Evaluator(None, fuel)
    if prelude is not None:
        ev.load(prelude)
    ev.load(p)
    return _guard(lambda: _run_main(ev, main), fuel)
