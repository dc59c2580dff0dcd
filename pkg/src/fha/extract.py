"""Type-erasing CPS extraction to the untyped lambda calculus.

A computation becomes ``\\h. \\r. ...`` taking a handler and a return
continuation; thunks are the identity, types vanish, and data uses Church
encodings.  Handlers are right-nested Church triples ``<ret, <bind, malg>>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

from . import checker as ck
from . import lam as L
from . import syntax as s
from .lam import LamTerm
from ._stack import deep

# ------------------------------------------------------- named builder


@dataclass(frozen=True)
class _N:
    """Named variable; converted to an index by ``_close``."""
    name: str


@dataclass(frozen=True)
class _NLam:
    var: str
    body: "_Named"
    hint: str = "x"


@dataclass(frozen=True)
class _NApp:
    fn: "_Named"
    arg: "_Named"


_Named = Union[_N, _NLam, _NApp, LamTerm]  # closed LamTerms may be embedded as leaves


class _Fresh:
    def __init__(self):
        self._ids = itertools.count()

    def lam(self, hint: str, body_fn) -> _NLam:
        v = f"{hint}#{next(self._ids)}"
        return _NLam(v, body_fn(_N(v)), hint)

    def lams(self, hints: str, body_fn) -> _Named:
        names = hints.split()
        vs = [f"{h}#{next(self._ids)}" for h in names]
        body = body_fn(*[_N(v) for v in vs])
        for v, h in zip(reversed(vs), reversed(names)):
            body = _NLam(v, body, h)
        return body


def _ap(f: _Named, *args: _Named) -> _Named:
    for a in args:
        f = _NApp(f, a)
    return f


def _close(t: _Named) -> LamTerm:
    """Convert a named term into de Bruijn form (iteratively)."""
    # explicit stack: (node, scope) -> result slots
    out: list = []
    stack: list = [("go", t, ())]
    while stack:
        tag, node, scope = stack.pop()
        if tag == "go":
            if isinstance(node, _N):
                try:
                    out.append(L.LVar(scope.index(node.name)))
                except ValueError:
                    raise s.InternalError(f"unbound extraction variable {node.name}") from None
            elif isinstance(node, _NLam):
                stack.append(("lam", node.hint, scope))
                stack.append(("go", node.body, (node.var,) + scope))
            elif isinstance(node, _NApp):
                stack.append(("app", None, scope))
                stack.append(("go", node.arg, scope))
                stack.append(("go", node.fn, scope))
            else:
                out.append(node)
        elif tag == "lam":
            out.append(L.LLam(out.pop(), node))
        else:
            a = out.pop()
            f = out.pop()
            out.append(L.LApp(f, a))
    return out[0]


# ------------------------------------------------------- fixed encodings

TRUE = L.lam("t", "f", L.LVar(1))
FALSE = L.lam("t", "f", L.LVar(0))
UNIT = L.lam("x", L.LVar(0))
FST = L.lam("a", "b", L.LVar(1))
SND = L.lam("a", "b", L.LVar(0))
Y = L.Y
# projections of a handler triple  \s. s ret (\s'. s' bind malg)
RET_OF = L.lam("r", "p", L.LVar(1))
BIND_OF = L.lam("r", "p", L.LApp(L.LVar(0), L.lam("b", "m", L.LVar(1))))
MALG_OF = L.lam("r", "p", L.LApp(L.LVar(0), L.lam("b", "m", L.LVar(0))))


def ret_of(h: LamTerm) -> LamTerm:
    return L.LApp(h, RET_OF)


def bind_of(h: LamTerm) -> LamTerm:
    return L.LApp(h, BIND_OF)


def malg_of(h: LamTerm) -> LamTerm:
    return L.LApp(h, MALG_OF)


def triple(ret: LamTerm, bind: LamTerm, malg: LamTerm) -> LamTerm:
    """``\\s. s ret (\\s'. s' bind malg)`` for closed field realizers."""
    inner = L.lam("s'", L.app(L.LVar(0), L.shift(bind, 0, 1), L.shift(malg, 0, 1)))
    return L.lam("s", L.app(L.LVar(0), L.shift(ret, 0, 1), L.shift(inner, 0, 1)))


# identity monad: ret = \a. a, bind = \m. \k. k m, malg = \x. x
IDENTITY_HANDLER = triple(L.lam("a", L.LVar(0)),
                          L.lam("m", "k", L.LApp(L.LVar(0), L.LVar(1))),
                          L.lam("x", L.LVar(0)))
IDENTITY = L.lam("a", L.LVar(0))


class ExtractError(Exception):
    """Input outside the extractable fragment (e.g. an unchecked ``op``)."""


# ------------------------------------------------------------- extractor


@dataclass
class Extractor:
    """Extraction against a checked global table.

    ``glob`` supplies the effect of each ``op`` (recorded by the checker) and the
    effect declarations whose ``hmap`` realizes operation forwarding.
    """
    glob: ck.Globals
    terms: dict = field(default_factory=dict)
    handlers: dict = field(default_factory=dict)
    default_effect: Optional[str] = None
    _fresh: _Fresh = field(default_factory=_Fresh)
    _consts: dict = field(default_factory=dict)
    _hmaps: dict = field(default_factory=dict)

    def load(self, program: Optional[s.Program]) -> None:
        for d in (program.decls if program else ()):
            if isinstance(d, s.TermDef):
                self.terms[d.name] = d.body
            elif isinstance(d, s.HandlerDef):
                self.handlers[d.name] = d.handler

    # ---- terms

    def term(self, env: tuple, t: s.Term) -> _Named:
        fr = self._fresh
        match t:
            case s.Var(i):
                if i >= len(env):
                    raise ExtractError("extraction of an open term")
                return env[i]
            case s.Const(name):
                return self.const(name)
            case s.Lam(_, body, name):
                return fr.lam(name, lambda x: self.term((x,) + env, body))
            case s.App(f, a):
                return _NApp(self.term(env, f), self.term(env, a))
            case s.TyLam(_, body):
                return self.term(env, body)
            case s.TyApp(f, _):
                return self.term(env, f)
            case s.Tt():
                return TRUE
            case s.Ff():
                return FALSE
            case s.Ite(c, a, b):
                return _ap(self.term(env, c), self.term(env, a), self.term(env, b))
            case s.UnitV():
                return UNIT
            case s.Pair(a, b):
                ea, eb = self.term(env, a), self.term(env, b)
                return fr.lam("s", lambda k: _ap(k, ea, eb))
            case s.Fst(p):
                return _NApp(self.term(env, p), FST)
            case s.Snd(p):
                return _NApp(self.term(env, p), SND)
            case s.Inl(_, a):
                ea = self.term(env, a)
                return fr.lams("l r", lambda l, r: _NApp(l, ea))
            case s.Inr(_, b):
                eb = self.term(env, b)
                return fr.lams("l r", lambda l, r: _NApp(r, eb))
            case s.Case(v, left, right, ln, rn):
                return _ap(self.term(env, v),
                           fr.lam(ln, lambda x: self.term((x,) + env, left)),
                           fr.lam(rn, lambda y: self.term((y,) + env, right)))
            case s.Absurd(_, a):
                return self.term(env, a)
            case s.Thunk(c) | s.PThunk(c):
                return self.comp(env, c)
            case s.Handle(h, c):
                hx = self.handler_expr(h)
                eh = self.handler(hx)
                return _ap(self.comp(env, c, hx.effect), eh, ret_of(eh))
        raise s.InternalError(f"not a term: {t!r}")

    def const(self, name: str) -> LamTerm:
        hit = self._consts.get(name)
        if hit is None:
            body = self.terms.get(name)
            if body is None:
                raise ExtractError(f"unknown term {name!r}")
            hit = _close(self.term((), body))
            self._consts[name] = hit
        return hit

    # ---- computations

    def comp(self, env: tuple, c: s.Comp, effect: Optional[str] = None) -> _Named:
        fr = self._fresh
        match c:
            case s.Val(a):
                ea = self.term(env, a)
                return fr.lams("h r", lambda h, r: _NApp(r, ea))
            case s.LetIn(bound, body, _, _, name):
                eb = self.comp(env, bound, effect)
                return fr.lams("h r", lambda h, r: _ap(
                    eb, h, fr.lam(name, lambda a: _ap(self.comp((a,) + env, body, effect), h, r))))
            case s.Op(p, body, _, _, name):
                eff = self.glob.op_effect(c) or effect or self.default_effect
                if eff is None or eff == ck.AMBIGUOUS:
                    raise ExtractError("the effect of an op is unknown; check the program first")
                ep = self.term(env, p)
                hm = self.hmap(eff)

                def op(h, r):
                    fm_m = fr.lams("f ma", lambda f, ma: _ap(
                        bind_of_n(h), ma, fr.lam("a", lambda a: _NApp(ret_of_n(h), _NApp(f, a)))))
                    sigma = fr.lam("c", lambda cc: _ap(cc, h, ret_of_n(h)))
                    mapped = _ap(hm, self.thunk_fmap(), fm_m, sigma, ep)
                    k = fr.lam(name, lambda a: _ap(self.comp((a,) + env, body, effect), h, r))
                    return _ap(bind_of_n(h), _NApp(malg_of_n(h), mapped), k)

                return fr.lams("h r", op)
            case s.Force(t):
                return self.term(env, t)
            case s.Fix(body, _, name):
                return _NApp(Y, fr.lam(name, lambda me: self.comp((me,) + env, body, effect)))
        raise s.InternalError(f"not a computation: {c!r}")

    def thunk_fmap(self) -> LamTerm:
        """``fmap f m = \\h. \\r. m h (\\y. r (f y))``: the thunk functor, realized."""
        return L.lam("f", "m", "h", "r",
                     L.app(L.LVar(2), L.LVar(1), L.lam("y", L.LApp(L.LVar(1),
                                                                   L.LApp(L.LVar(4), L.LVar(0))))))

    def hmap(self, effect: str) -> LamTerm:
        hit = self._hmaps.get(effect)
        if hit is None:
            decl = self.glob.effects.get(effect)
            if decl is None:
                raise ExtractError(f"unknown effect {effect!r}")
            hit = _close(self.term((), decl.hmap))
            self._hmaps[effect] = hit
        return hit

    # ---- handlers

    def handler_expr(self, h: s.HandlerLike) -> s.HandlerExpr:
        if isinstance(h, s.HandlerRef):
            hx = self.handlers.get(h.name) or self.glob.handlers.get(h.name)
            if hx is None:
                raise ExtractError(f"unknown handler {h.name!r}")
            return hx
        return h

    def handler(self, h: s.HandlerExpr) -> LamTerm:
        return triple(_close(self.term((), h.ret)), _close(self.term((), h.bind)),
                      _close(self.term((), h.malg)))


def bind_of_n(h: _Named) -> _Named:
    return _NApp(h, BIND_OF)


def ret_of_n(h: _Named) -> _Named:
    return _NApp(h, RET_OF)


def malg_of_n(h: _Named) -> _Named:
    return _NApp(h, MALG_OF)


# ------------------------------------------------------------ entry points


def _extractor(glob: Optional[ck.Globals], program: Optional[s.Program],
               prelude: Optional[s.Program], effect: Optional[str] = None) -> Extractor:
    if glob is None:
        glob = ck.Globals.of(prelude, program)
    ex = Extractor(glob, default_effect=effect)
    ex.load(prelude)
    ex.load(program)
    return ex


def _names(env) -> tuple:
    return tuple(_N(f"env{i}") for i in range(env)) if isinstance(env, int) else tuple(env)


def extract_term(t: s.Term, glob: Optional[ck.Globals] = None,
                 program: Optional[s.Program] = None, prelude: Optional[s.Program] = None
                 ) -> LamTerm:
    """Extract a closed term."""
    return _close(_extractor(glob, program, prelude).term((), t))


def extract_comp(c: s.Comp, glob: Optional[ck.Globals] = None, effect: Optional[str] = None,
                 program: Optional[s.Program] = None, prelude: Optional[s.Program] = None
                 ) -> LamTerm:
    """Extract a closed computation to ``\\h. \\r. ...``.

    ``effect`` names the effect of ops not annotated by the checker.
    """
    return _close(_extractor(glob, program, prelude, effect).comp((), c, effect))


def extract_handler(h: s.HandlerLike, glob: Optional[ck.Globals] = None,
                    program: Optional[s.Program] = None, prelude: Optional[s.Program] = None
                    ) -> LamTerm:
    ex = _extractor(glob, program, prelude)
    return ex.handler(ex.handler_expr(h))


@deep
def extract_program(p: s.Program, prelude: Optional[s.Program] = None,
                    glob: Optional[ck.Globals] = None) -> LamTerm:
    """Check ``p`` (unless ``glob`` is given) and extract ``main`` as ``c h0 (\\a. a)``.

    ``h0`` is the identity-monad triple; its algebra is never reached at an
    effect without operations.
    """
    main = p.main
    if main is None:
        raise ExtractError("program has no main")
    if glob is None:
        glob = ck.check_program(p, prelude)
    ex = _extractor(glob, p, prelude, main.effect)
    return L.app(_close(ex.comp((), main.comp, main.effect)), IDENTITY_HANDLER, IDENTITY)


# ---------------------------------------------------------------- decoding


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __str__(self) -> str:
        return "unknown"


def decode_value(t: LamTerm, ty: s.TypeExpr, glob: Optional[ck.Globals] = None,
                 budget: int = 1_000_000):
    """Read a first-order value back from its Church encoding.

    Returns an evaluator value (``VTt``, ``VPair`` ...) or ``Unknown``.
    """
    from . import evaluator as ev
    ty = ck.normalize_type(ck.Context(glob or ck.Globals()), ty)
    try:
        return _decode(t, ty, budget, ev)
    except L.BudgetExceeded as e:
        return Unknown(f"budget exceeded after {e.steps} steps")


def _decode(t, ty, budget, ev):
    match ty:
        case s.TBool():
            r = L.decode_bool(t, budget)
            if r == L.TT_NAME:
                return ev.TT
            if r == L.FF_NAME:
                return ev.FF
            return Unknown("not a Church boolean")
        case s.TUnit():
            L.normalize(t, budget)
            return ev.UNIT
        case s.TProd(a, b):
            va = _decode(L.LApp(t, FST), a, budget, ev)
            vb = _decode(L.LApp(t, SND), b, budget, ev)
            if isinstance(va, Unknown) or isinstance(vb, Unknown):
                return va if isinstance(va, Unknown) else vb
            return ev.VPair(va, vb)
        case s.TSum(a, b):
            nf = L.normalize(L.app(t, L.LFreeConst("INL"), L.LFreeConst("INR")), budget)
            if isinstance(nf, L.LApp) and isinstance(nf.fn, L.LFreeConst):
                side = nf.fn.name
                if side in ("INL", "INR"):
                    v = _decode(nf.arg, a if side == "INL" else b, budget, ev)
                    if isinstance(v, Unknown):
                        return v
                    return ev.VInl(v) if side == "INL" else ev.VInr(v)
            return Unknown("not a Church injection")
    return Unknown("not a first-order type")
