"""Core abstract syntax: kinds, types, terms, computations, effects, handlers.

Every binder uses de Bruijn indices.  Type variables and term variables live
in separate index spaces.  Binder name hints are kept for pretty printing only
and never take part in equality, so ``==`` on two nodes is alpha-equivalence.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Union


class Mode(enum.Enum):
    TOTAL = "total"
    PARTIAL = "partial"

    def __str__(self) -> str:
        return self.value


class InternalError(Exception):
    """Raised when an invariant of the core syntax is broken (a compiler bug)."""


# --------------------------------------------------------------------- kinds


@dataclass(frozen=True)
class KTy:
    pass


@dataclass(frozen=True)
class KArrow:
    dom: "Kind"
    cod: "Kind"


Kind = Union[KTy, KArrow]

TY = KTy()
EFTY = KArrow(TY, TY)
HTYCO = KArrow(EFTY, EFTY)


# --------------------------------------------------------------------- types


@dataclass(frozen=True)
class TVar:
    index: int


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TBool:
    pass


@dataclass(frozen=True)
class TEmpty:
    pass


@dataclass(frozen=True)
class TArrow:
    dom: "TypeExpr"
    cod: "TypeExpr"


@dataclass(frozen=True)
class TForall:
    kind: Kind
    body: "TypeExpr"
    name: str = field(default="a", compare=False)


@dataclass(frozen=True)
class TProd:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class TSum:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class TLam:
    kind: Kind
    body: "TypeExpr"
    name: str = field(default="a", compare=False)


@dataclass(frozen=True)
class TApp:
    fn: "TypeExpr"
    arg: "TypeExpr"


@dataclass(frozen=True)
class TTh:
    effect: str
    arg: "TypeExpr"


@dataclass(frozen=True)
class TPTh:
    effect: str
    arg: "TypeExpr"


@dataclass(frozen=True)
class TConst:
    name: str


TypeExpr = Union[TVar, TUnit, TBool, TEmpty, TArrow, TForall, TProd, TSum,
                 TLam, TApp, TTh, TPTh, TConst]

UNIT = TUnit()
BOOL = TBool()
EMPTY = TEmpty()


def th_type(mode: Mode, effect: str, arg: TypeExpr) -> TypeExpr:
    return TTh(effect, arg) if mode is Mode.TOTAL else TPTh(effect, arg)


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    """Reference to a top-level term definition."""
    name: str


@dataclass(frozen=True)
class Lam:
    annotation: TypeExpr
    body: "Term"
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class TyLam:
    kind: Kind
    body: "Term"
    name: str = field(default="a", compare=False)


@dataclass(frozen=True)
class TyApp:
    fn: "Term"
    arg: TypeExpr


@dataclass(frozen=True)
class Tt:
    pass


@dataclass(frozen=True)
class Ff:
    pass


@dataclass(frozen=True)
class Ite:
    cond: "Term"
    then: "Term"
    else_: "Term"


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class Pair:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Fst:
    pair: "Term"


@dataclass(frozen=True)
class Snd:
    pair: "Term"


@dataclass(frozen=True)
class Inl:
    target: Optional[TypeExpr]
    value: "Term"


@dataclass(frozen=True)
class Inr:
    target: Optional[TypeExpr]
    value: "Term"


@dataclass(frozen=True)
class Case:
    scrutinee: "Term"
    left: "Term"
    right: "Term"
    lname: str = field(default="x", compare=False)
    rname: str = field(default="y", compare=False)


@dataclass(frozen=True)
class Absurd:
    target: TypeExpr
    value: "Term"


@dataclass(frozen=True)
class Thunk:
    comp: "Comp"


@dataclass(frozen=True)
class PThunk:
    comp: "Comp"


@dataclass(frozen=True)
class Handle:
    """``handle h c``: fold the computation ``c`` into the handler's monad."""
    handler: "HandlerLike"
    comp: "Comp"
    result: Optional[TypeExpr] = None


Term = Union[Var, Const, Lam, App, TyLam, TyApp, Tt, Ff, Ite, UnitV, Pair, Fst,
             Snd, Inl, Inr, Case, Absurd, Thunk, PThunk, Handle]

TT = Tt()
FF = Ff()
UNIT_V = UnitV()


# -------------------------------------------------------------- computations


@dataclass(frozen=True)
class Val:
    term: Term
    mode: Mode = Mode.TOTAL


@dataclass(frozen=True)
class LetIn:
    bound: "Comp"
    body: "Comp"
    annotation: Optional[TypeExpr] = None
    mode: Mode = Mode.TOTAL
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Op:
    """``op p (x. c)``; ``result`` is the type of the operation's result."""
    operand: Term
    body: "Comp"
    result: Optional[TypeExpr] = None
    mode: Mode = Mode.TOTAL
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Force:
    term: Term
    mode: Mode = Mode.TOTAL


@dataclass(frozen=True)
class Fix:
    body: "Comp"
    mode: Mode = Mode.PARTIAL
    name: str = field(default="self", compare=False)


Comp = Union[Val, LetIn, Op, Force, Fix]


# ------------------------------------------------------ effects and handlers


@dataclass(frozen=True)
class OpSig:
    name: str
    param: TypeExpr
    result: TypeExpr


@dataclass(frozen=True)
class EffectDecl:
    """A named raw higher-order functor.

    ``hfmap`` and ``hmap`` take functors as (type function, fmap) pairs:
    ``hfmap : forall F. fmap-ty F -> fmap-ty (H F)`` and
    ``hmap : forall F. fmap-ty F -> forall G. fmap-ty G -> trans F G -> trans (H F) (H G)``.
    ``ops`` is set when the declaration came from algebraic row sugar.
    """
    name: str
    carrier: TypeExpr
    hfmap: Term
    hmap: Term
    ops: Optional[tuple[OpSig, ...]] = None


@dataclass(frozen=True)
class HandlerExpr:
    effect: str
    monad: TypeExpr
    ret: Term
    bind: Term
    malg: Term
    via: Optional[TypeExpr] = None

    @property
    def mode(self) -> Mode:
        return Mode.TOTAL if self.via is None else Mode.PARTIAL


@dataclass(frozen=True)
class HandlerRef:
    name: str


HandlerLike = Union[HandlerExpr, HandlerRef]


# -------------------------------------------------------------- declarations


@dataclass(frozen=True)
class TypeDef:
    name: str
    kind: Kind
    body: TypeExpr
    span: Optional[tuple[int, int]] = field(default=None, compare=False)


@dataclass(frozen=True)
class EffectDef:
    decl: EffectDecl
    span: Optional[tuple[int, int]] = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return self.decl.name


@dataclass(frozen=True)
class TermDef:
    name: str
    type: TypeExpr
    body: Term
    span: Optional[tuple[int, int]] = field(default=None, compare=False)


@dataclass(frozen=True)
class HandlerDef:
    name: str
    handler: HandlerExpr
    span: Optional[tuple[int, int]] = field(default=None, compare=False)


@dataclass(frozen=True)
class Main:
    mode: Mode
    effect: str
    type: TypeExpr
    comp: Comp
    handler: Optional[HandlerLike] = None
    span: Optional[tuple[int, int]] = field(default=None, compare=False)

    name = "main"


Decl = Union[TypeDef, EffectDef, TermDef, HandlerDef, Main]


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...] = ()

    def __add__(self, other: "Program") -> "Program":
        return Program(self.decls + other.decls)

    @property
    def main(self) -> Optional[Main]:
        mains = [d for d in self.decls if isinstance(d, Main)]
        return mains[-1] if mains else None

    def lookup(self, kind: type, name: str):
        for d in reversed(self.decls):
            if isinstance(d, kind) and d.name == name:
                return d
        return None


Node = Union[TypeExpr, Term, Comp, HandlerExpr]

# ---------------------------------------------------------------- traversal

_TypeFn = Callable[[int, int], TypeExpr]
_TermFn = Callable[[int, int, int], Term]


def _map(node, tv: Optional[_TypeFn], v: Optional[_TermFn], td: int, vd: int):
    """Rebuild ``node``, replacing variables through ``tv``/``v``.

    ``tv(index, type_depth)`` handles type variables, ``v(index, term_depth,
    type_depth)`` term variables; ``None`` leaves that index space alone.
    """
    m = _map
    match node:
        # types
        case TVar(i):
            return tv(i, td) if tv is not None else node
        case TUnit() | TBool() | TEmpty() | TConst():
            return node
        case TArrow(a, b):
            return TArrow(m(a, tv, v, td, vd), m(b, tv, v, td, vd))
        case TProd(a, b):
            return TProd(m(a, tv, v, td, vd), m(b, tv, v, td, vd))
        case TSum(a, b):
            return TSum(m(a, tv, v, td, vd), m(b, tv, v, td, vd))
        case TForall(k, body, name):
            return TForall(k, m(body, tv, v, td + 1, vd), name)
        case TLam(k, body, name):
            return TLam(k, m(body, tv, v, td + 1, vd), name)
        case TApp(f, a):
            return TApp(m(f, tv, v, td, vd), m(a, tv, v, td, vd))
        case TTh(e, a):
            return TTh(e, m(a, tv, v, td, vd))
        case TPTh(e, a):
            return TPTh(e, m(a, tv, v, td, vd))
        # terms
        case Var(i):
            return v(i, vd, td) if v is not None else node
        case Const() | Tt() | Ff() | UnitV():
            return node
        case Lam(ann, body, name):
            return Lam(_mt(ann, tv, v, td, vd), m(body, tv, v, td, vd + 1), name)
        case App(f, a):
            return App(m(f, tv, v, td, vd), m(a, tv, v, td, vd))
        case TyLam(k, body, name):
            return TyLam(k, m(body, tv, v, td + 1, vd), name)
        case TyApp(f, a):
            return TyApp(m(f, tv, v, td, vd), _mt(a, tv, v, td, vd))
        case Ite(c, a, b):
            return Ite(m(c, tv, v, td, vd), m(a, tv, v, td, vd), m(b, tv, v, td, vd))
        case Pair(a, b):
            return Pair(m(a, tv, v, td, vd), m(b, tv, v, td, vd))
        case Fst(p):
            return Fst(m(p, tv, v, td, vd))
        case Snd(p):
            return Snd(m(p, tv, v, td, vd))
        case Inl(t, a):
            return Inl(_mt(t, tv, v, td, vd), m(a, tv, v, td, vd))
        case Inr(t, a):
            return Inr(_mt(t, tv, v, td, vd), m(a, tv, v, td, vd))
        case Case(s, l, r, ln, rn):
            return Case(m(s, tv, v, td, vd), m(l, tv, v, td, vd + 1),
                        m(r, tv, v, td, vd + 1), ln, rn)
        case Absurd(t, a):
            return Absurd(_mt(t, tv, v, td, vd), m(a, tv, v, td, vd))
        case Thunk(c):
            return Thunk(m(c, tv, v, td, vd))
        case PThunk(c):
            return PThunk(m(c, tv, v, td, vd))
        case Handle(h, c, r):
            return Handle(m(h, tv, v, td, vd), m(c, tv, v, td, vd), _mt(r, tv, v, td, vd))
        # computations
        case Val(t, mode):
            return Val(m(t, tv, v, td, vd), mode)
        case LetIn(b, body, ann, mode, name):
            return LetIn(m(b, tv, v, td, vd), m(body, tv, v, td, vd + 1),
                         _mt(ann, tv, v, td, vd), mode, name)
        case Op(p, body, res, mode, name):
            return Op(m(p, tv, v, td, vd), m(body, tv, v, td, vd + 1),
                      _mt(res, tv, v, td, vd), mode, name)
        case Force(t, mode):
            return Force(m(t, tv, v, td, vd), mode)
        case Fix(body, mode, name):
            return Fix(m(body, tv, v, td, vd + 1), mode, name)
        # handlers
        case HandlerExpr(e, mon, ret, bind, malg, via):
            return HandlerExpr(e, _mt(mon, tv, v, td, vd), m(ret, tv, v, td, vd),
                               m(bind, tv, v, td, vd), m(malg, tv, v, td, vd),
                               _mt(via, tv, v, td, vd))
        case HandlerRef():
            return node
    raise InternalError(f"not a syntax node: {node!r}")


def _mt(t, tv, v, td, vd):
    if t is None or tv is None:
        return t
    return _map(t, tv, v, td, vd)


def _is_type(node) -> bool:
    return isinstance(node, (TVar, TUnit, TBool, TEmpty, TArrow, TForall, TProd,
                             TSum, TLam, TApp, TTh, TPTh, TConst))


def _is_term(node) -> bool:
    return isinstance(node, (Var, Const, Lam, App, TyLam, TyApp, Tt, Ff, Ite, UnitV,
                             Pair, Fst, Snd, Inl, Inr, Case, Absurd, Thunk, PThunk,
                             Handle))


def shift_type(node, cutoff: int, amount: int):
    """Shift free type variables ``>= cutoff`` by ``amount`` anywhere in ``node``."""
    if amount == 0:
        return node

    def tv(i: int, td: int) -> TypeExpr:
        if i < cutoff + td:
            return TVar(i)
        if i + amount < 0:
            raise InternalError(f"negative type index after shift: {i}{amount:+d}")
        return TVar(i + amount)

    return _map(node, tv, None, 0, 0)


def shift_term(node, cutoff: int, amount: int):
    """Shift free term variables ``>= cutoff`` by ``amount``."""
    if amount == 0:
        return node

    def v(i: int, vd: int, td: int) -> Term:
        if i < cutoff + vd:
            return Var(i)
        if i + amount < 0:
            raise InternalError(f"negative term index after shift: {i}{amount:+d}")
        return Var(i + amount)

    return _map(node, None, v, 0, 0)


def shift(node, cutoff: int, amount: int):
    """Shift the variables a node is indexed by: type variables for types,
    term variables for terms and computations."""
    if _is_type(node):
        return shift_type(node, cutoff, amount)
    return shift_term(node, cutoff, amount)


def subst_type(node, replacement: TypeExpr, slot: int = 0):
    """Replace type variable ``slot`` by ``replacement``; higher indices drop by one."""

    def tv(i: int, td: int) -> TypeExpr:
        if i == slot + td:
            return shift_type(replacement, 0, td)
        if i > slot + td:
            return TVar(i - 1)
        return TVar(i)

    return _map(node, tv, None, 0, 0)


def subst_term(node, replacement: Term, slot: int = 0):
    """Replace term variable ``slot`` by ``replacement``; higher indices drop by one."""

    def v(i: int, vd: int, td: int) -> Term:
        if i == slot + vd:
            return shift_term(shift_type(replacement, 0, td), 0, vd)
        if i > slot + vd:
            return Var(i - 1)
        return Var(i)

    return _map(node, None, v, 0, 0)


def substitute(target, replacement, slot: int = 0):
    """Capture-avoiding substitution of ``replacement`` for variable ``slot``.

    A type replacement substitutes a type variable (in a type, term, or
    computation); a term replacement substitutes a term variable.
    """
    if _is_type(replacement):
        return subst_type(target, replacement, slot)
    if _is_term(replacement):
        return subst_term(target, replacement, slot)
    raise InternalError(f"cannot substitute {replacement!r}")


def alpha_equal(a, b) -> bool:
    return a == b


def instantiate(body, replacement):
    """Open a one-variable binder body with ``replacement`` (index 0)."""
    return substitute(body, replacement, 0)


def comp_modes(c: Comp):
    """Yield the mode of every computation node reachable without crossing a thunk."""
    stack = [c]
    while stack:
        n = stack.pop()
        yield n.mode
        match n:
            case LetIn(b, body):
                stack.extend((b, body))
            case Op(_, body) | Fix(body):
                stack.append(body)


def free_term_vars(node) -> set[int]:
    out: set[int] = set()

    def v(i: int, vd: int, td: int) -> Term:
        if i >= vd:
            out.add(i - vd)
        return Var(i)

    _map(node, None, v, 0, 0)
    return out


def free_type_vars(node) -> set[int]:
    out: set[int] = set()

    def tv(i: int, td: int) -> TypeExpr:
        if i >= td:
            out.add(i - td)
        return TVar(i)

    _map(node, tv, None, 0, 0)
    return out


def with_mode(c: Comp, mode: Mode) -> Comp:
    """Retag a computation tree (not crossing thunks) with ``mode``."""
    match c:
        case Val(t):
            return Val(t, mode)
        case LetIn(b, body, ann, _, name):
            return LetIn(with_mode(b, mode), with_mode(body, mode), ann, mode, name)
        case Op(p, body, res, _, name):
            return Op(p, with_mode(body, mode), res, mode, name)
        case Force(t):
            return Force(t, mode)
        case Fix(body, _, name):
            return Fix(with_mode(body, mode), mode, name)
    raise InternalError(f"not a computation: {c!r}")


def arrows(*types: TypeExpr) -> TypeExpr:
    """``arrows(A, B, C)`` is ``A -> B -> C``."""
    out = types[-1]
    for t in reversed(types[:-1]):
        out = TArrow(t, out)
    return out


def apps(fn: Term, *args: Union[Term, TypeExpr]) -> Term:
    """Apply ``fn`` to a mix of term and type arguments."""
    out = fn
    for a in args:
        out = TyApp(out, a) if _is_type(a) else App(out, a)
    return out


def tapps(fn: TypeExpr, *args: TypeExpr) -> TypeExpr:
    out = fn
    for a in args:
        out = TApp(out, a)
    return out


def map_nodes(node, fn):
    """Bottom-up rebuild of every dataclass node reachable from ``node``."""
    if isinstance(node, tuple):
        return tuple(map_nodes(x, fn) for x in node)
    if not hasattr(node, "__dataclass_fields__") or isinstance(node, Mode):
        return node
    changes = {}
    for f in dataclasses.fields(node):
        old = getattr(node, f.name)
        new = map_nodes(old, fn)
        if new is not old:
            changes[f.name] = new
    out = dataclasses.replace(node, **changes) if changes else node
    return fn(out)


def replace_consts(node, types: Optional[dict] = None, terms: Optional[dict] = None):
    """Replace ``TConst``/``Const`` references by closed types/terms."""
    types = types or {}
    terms = terms or {}

    def fn(n):
        if isinstance(n, TConst) and n.name in types:
            return types[n.name]
        if isinstance(n, Const) and n.name in terms:
            return terms[n.name]
        return n

    return map_nodes(node, fn)
