"""Kind checking, type normalization and bidirectional type checking.

Introduction forms (lambdas without a known codomain, unannotated sums,
thunks) are checked against an expected type; eliminators and annotated forms
synthesize.  Type equality compares beta-normal, eta-short forms with
top-level type definitions unfolded.  ``Th``/``PTh`` compare nominally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from . import templates as tpl
from .syntax import Mode
from ._stack import deep
from .typenf import normal_form


class FhaTypeError(Exception):
    """A kind or type error, optionally with the two disagreeing normal forms."""

    def __init__(self, message: str, expected=None, actual=None, span=None, file="<input>"):
        self.message = message
        self.expected = expected
        self.actual = actual
        self.span = span
        self.file = file
        super().__init__(self.render())

    def render(self, context: Optional[s.Program] = None) -> str:
        start, end = self.span if self.span else (0, 0)
        out = f"{self.file}:{start}-{end}: error: {self.message}"
        if self.expected is not None or self.actual is not None:
            out += f"\n  expected: {_show(self.expected, context)}"
            out += f"\n  actual: {_show(self.actual, context)}"
        return out

    def __str__(self) -> str:
        return self.render()


def _show(x, context) -> str:
    from .parser import pretty_kind, pretty_type
    if x is None:
        return "-"
    if isinstance(x, str):
        return x
    if isinstance(x, (s.KTy, s.KArrow)):
        return pretty_kind(x)
    try:
        return pretty_type(x, context, tvars=tuple(f"t{i}" for i in range(64))[::-1])
    except Exception:  # noqa: BLE001 - rendering must never mask the real error
        return repr(x)


AMBIGUOUS = "<ambiguous>"


@dataclass
class Globals:
    """Top-level declarations visible to the checker."""
    types: dict = field(default_factory=dict)
    effects: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    handlers: dict = field(default_factory=dict)
    # id(Op node) -> (node, effect name), filled in while checking; used by extraction
    op_effects: dict = field(default_factory=dict)

    def note_op(self, node: s.Op, effect: str) -> None:
        hit = self.op_effects.get(id(node))
        if hit is not None and hit[0] is node and hit[1] != effect:
            effect = AMBIGUOUS
        self.op_effects[id(node)] = (node, effect)

    def op_effect(self, node: s.Op) -> Optional[str]:
        hit = self.op_effects.get(id(node))
        return hit[1] if hit is not None and hit[0] is node else None

    def type_body(self, name: str) -> s.TypeExpr:
        d = self.types.get(name)
        if d is None:
            raise FhaTypeError(f"unknown type {name!r}")
        return d.body

    def add(self, d: s.Decl) -> None:
        if isinstance(d, s.TypeDef):
            self.types[d.name] = d
        elif isinstance(d, s.EffectDef):
            self.effects[d.name] = d.decl
        elif isinstance(d, s.TermDef):
            self.terms[d.name] = d.type
        elif isinstance(d, s.HandlerDef):
            self.handlers[d.name] = d.handler

    @classmethod
    def of(cls, *programs: Optional[s.Program]) -> "Globals":
        g = cls()
        for p in programs:
            for d in (p.decls if p else ()):
                g.add(d)
        return g


@dataclass(frozen=True)
class Context:
    """Typing context; each term variable remembers the type depth it was bound at."""
    glob: Globals
    tvars: tuple = ()
    vars: tuple = ()

    def with_tvar(self, k: s.Kind) -> "Context":
        return Context(self.glob, self.tvars + (k,), self.vars)

    def with_var(self, t: s.TypeExpr) -> "Context":
        return Context(self.glob, self.tvars, self.vars + ((t, len(self.tvars)),))

    def lookup_var(self, i: int) -> s.TypeExpr:
        if i >= len(self.vars):
            raise FhaTypeError(f"unbound variable (index {i})")
        t, depth = self.vars[len(self.vars) - 1 - i]
        return s.shift_type(t, 0, len(self.tvars) - depth)

    def lookup_tvar(self, i: int) -> s.Kind:
        if i >= len(self.tvars):
            raise FhaTypeError(f"unbound type variable (index {i})")
        return self.tvars[len(self.tvars) - 1 - i]


def empty_context(*programs: Optional[s.Program]) -> Context:
    return Context(Globals.of(*programs))


# ---------------------------------------------------------------- kinds


def infer_kind(ctx: Context, t: s.TypeExpr) -> s.Kind:
    match t:
        case s.TVar(i):
            return ctx.lookup_tvar(i)
        case s.TUnit() | s.TBool() | s.TEmpty():
            return s.TY
        case s.TConst(name):
            d = ctx.glob.types.get(name)
            if d is None:
                raise FhaTypeError(f"unknown type {name!r}")
            return d.kind
        case s.TArrow(a, b) | s.TProd(a, b) | s.TSum(a, b):
            _expect_kind(ctx, a, s.TY)
            _expect_kind(ctx, b, s.TY)
            return s.TY
        case s.TForall(k, body):
            _expect_kind(ctx.with_tvar(k), body, s.TY)
            return s.TY
        case s.TLam(k, body):
            return s.KArrow(k, infer_kind(ctx.with_tvar(k), body))
        case s.TApp(f, a):
            kf = infer_kind(ctx, f)
            if not isinstance(kf, s.KArrow):
                raise FhaTypeError("type applied to an argument but has no arrow kind",
                                   s.KArrow(infer_kind(ctx, a), s.TY), kf)
            _expect_kind(ctx, a, kf.dom)
            return kf.cod
        case s.TTh(e, a) | s.TPTh(e, a):
            if e not in ctx.glob.effects:
                raise FhaTypeError(f"unknown effect {e!r}")
            ka = infer_kind(ctx, a)
            if ka != s.TY:
                raise FhaTypeError("thunk type argument must have kind Ty", s.TY, ka)
            return s.TY
    raise s.InternalError(f"not a type: {t!r}")


def _expect_kind(ctx: Context, t: s.TypeExpr, k: s.Kind) -> None:
    got = infer_kind(ctx, t)
    if got != k:
        raise FhaTypeError("kind mismatch", k, got)


def normalize_type(ctx: Context, t: s.TypeExpr) -> s.TypeExpr:
    return normal_form(t, ctx.glob.type_body)


def types_equal(ctx: Context, a: s.TypeExpr, b: s.TypeExpr) -> bool:
    return normalize_type(ctx, a) == normalize_type(ctx, b)


def _require_equal(ctx: Context, expected: s.TypeExpr, actual: s.TypeExpr, what: str) -> None:
    ne, na = normalize_type(ctx, expected), normalize_type(ctx, actual)
    if ne != na:
        raise FhaTypeError(f"type mismatch in {what}", ne, na)


def _as(ctx: Context, t: s.TypeExpr, cls, what: str):
    n = normalize_type(ctx, t)
    if not isinstance(n, cls):
        raise FhaTypeError(f"{what}", cls.__name__.lstrip("T").lower(), n)
    return n


# ---------------------------------------------------- derived record types

FMAP_TY = "forall (a:Ty). forall (b:Ty). (a -> b) -> FF a -> FF b"


def fmap_ty(f: s.TypeExpr) -> s.TypeExpr:
    """``forall a b. (a -> b) -> F a -> F b`` for a closed functor ``F``."""
    return tpl.ty(FMAP_TY, {"FF": f})


def hfmap_type(carrier: s.TypeExpr) -> s.TypeExpr:
    return tpl.ty("forall (F:Ty -> Ty). (forall (a:Ty). forall (b:Ty). (a -> b) -> F a -> F b)"
                  " -> forall (a:Ty). forall (b:Ty). (a -> b) -> HH F a -> HH F b",
                  {"HH": carrier})


def hmap_type(carrier: s.TypeExpr) -> s.TypeExpr:
    return tpl.ty("forall (F:Ty -> Ty). (forall (a:Ty). forall (b:Ty). (a -> b) -> F a -> F b)"
                  " -> forall (G:Ty -> Ty). (forall (a:Ty). forall (b:Ty). (a -> b) -> G a -> G b)"
                  " -> (forall (a:Ty). F a -> G a) -> forall (a:Ty). HH F a -> HH G a",
                  {"HH": carrier})


def handler_field_types(carrier: s.TypeExpr, monad: s.TypeExpr) -> dict:
    t = {"HH": carrier, "MM": monad}
    return {
        "ret": tpl.ty("forall (a:Ty). a -> MM a", t),
        "bind": tpl.ty("forall (a:Ty). forall (b:Ty). MM a -> (a -> MM b) -> MM b", t),
        "malg": tpl.ty("forall (a:Ty). HH MM a -> MM a", t),
    }


def operand_type(ctx: Context, effect: str, result: s.TypeExpr, mode: Mode) -> s.TypeExpr:
    """Normalized type of an ``op`` operand: ``carrier (Th E) X``."""
    decl = ctx.glob.effects[effect]
    thunk = s.TLam(s.TY, s.th_type(mode, effect, s.TVar(0)), "a")
    carrier = s.shift_type(decl.carrier, 0, len(ctx.tvars))
    return normalize_type(ctx, s.TApp(s.TApp(carrier, thunk), result))


def is_void_like(ctx: Context, effect: str) -> bool:
    decl = ctx.glob.effects.get(effect)
    if decl is None:
        return False
    void = s.TLam(s.EFTY, s.TLam(s.TY, s.EMPTY))
    return normalize_type(ctx, decl.carrier) == void


# ---------------------------------------------------------------- terms


def check_term(ctx: Context, t: s.Term, expected: s.TypeExpr) -> None:
    """Check ``t`` against ``expected`` (which must have kind Ty)."""
    match t:
        case s.Lam(ann, body):
            exp = _as(ctx, expected, s.TArrow, "a lambda needs a function type")
            _expect_kind(ctx, ann, s.TY)
            _require_equal(ctx, exp.dom, ann, "lambda annotation")
            check_term(ctx.with_var(ann), body, exp.cod)
            return
        case s.TyLam(k, body):
            exp = _as(ctx, expected, s.TForall, "a type abstraction needs a forall type")
            if exp.kind != k:
                raise FhaTypeError("kind mismatch in type abstraction", exp.kind, k)
            check_term(ctx.with_tvar(k), body, exp.body)
            return
        case s.Ite(c, a, b):
            check_term(ctx, c, s.BOOL)
            check_term(ctx, a, expected)
            check_term(ctx, b, expected)
            return
        case s.Pair(a, b):
            exp = _as(ctx, expected, s.TProd, "a pair needs a product type")
            check_term(ctx, a, exp.left)
            check_term(ctx, b, exp.right)
            return
        case s.Inl(None, a) | s.Inr(None, a):
            exp = _as(ctx, expected, s.TSum, "an injection needs a sum type")
            check_term(ctx, a, exp.left if isinstance(t, s.Inl) else exp.right)
            return
        case s.Case(scrut, left, right):
            st = _as(ctx, synth_term(ctx, scrut), s.TSum, "case scrutinee must have a sum type")
            check_term(ctx.with_var(st.left), left, s.shift_type(expected, 0, 0))
            check_term(ctx.with_var(st.right), right, expected)
            return
        case s.Handle(h, c, None):
            try:
                actual = synth_term(ctx, t)
            except FhaTypeError as err:
                hx = resolve_handler(ctx, h, c.mode)
                a = _match_monad(ctx, hx.monad, expected)
                if a is None:
                    raise err
                check_term(ctx, s.Handle(h, c, a), expected)
                return
            _require_equal(ctx, expected, actual, "handle")
            return
        case s.Thunk(c) | s.PThunk(c):
            mode = Mode.TOTAL if isinstance(t, s.Thunk) else Mode.PARTIAL
            cls = s.TTh if mode is Mode.TOTAL else s.TPTh
            kw = "thunk" if mode is Mode.TOTAL else "pthunk"
            exp = _as(ctx, expected, cls, f"{kw} needs a {cls.__name__[1:]} type")
            check_comp(ctx, c, exp.effect, exp.arg, mode)
            return
    actual = synth_term(ctx, t)
    _require_equal(ctx, expected, actual, type(t).__name__.lower())


def _match_monad(ctx: Context, monad: s.TypeExpr, expected: s.TypeExpr):
    """Solve ``M ?a = expected`` for ``?a`` by first-order matching, or None."""
    n = len(ctx.tvars)
    pattern = normalize_type(ctx, s.TApp(monad, s.TVar(n)))
    target = normalize_type(ctx, expected)
    found: list = []

    def go(p, e, depth) -> bool:
        if p == s.TVar(n + depth):
            if any(i < depth for i in s.free_type_vars(e)):
                return False
            sol = s.shift_type(e, 0, -depth)
            if found and found[0] != sol:
                return False
            found[:] = [sol]
            return True
        if type(p) is not type(e):
            return False
        match p:
            case s.TArrow() | s.TProd() | s.TSum():
                a, b = (p.dom, p.cod) if isinstance(p, s.TArrow) else (p.left, p.right)
                c, d = (e.dom, e.cod) if isinstance(e, s.TArrow) else (e.left, e.right)
                return go(a, c, depth) and go(b, d, depth)
            case s.TApp(f, a):
                return go(f, e.fn, depth) and go(a, e.arg, depth)
            case s.TTh(eff, a) | s.TPTh(eff, a):
                return eff == e.effect and go(a, e.arg, depth)
            case s.TForall(k, b) | s.TLam(k, b):
                return k == e.kind and go(b, e.body, depth + 1)
        return p == e

    if not go(pattern, target, 0):
        return None
    return found[0] if found else s.UNIT


def synth_term(ctx: Context, t: s.Term) -> s.TypeExpr:
    """Synthesize the (normalized) type of an eliminator or annotated form."""
    match t:
        case s.Var(i):
            return normalize_type(ctx, ctx.lookup_var(i))
        case s.Const(name):
            ty = ctx.glob.terms.get(name)
            if ty is None:
                raise FhaTypeError(f"unknown term {name!r}")
            return normalize_type(ctx, ty)
        case s.Tt() | s.Ff():
            return s.BOOL
        case s.UnitV():
            return s.UNIT
        case s.Lam(ann, body):
            _expect_kind(ctx, ann, s.TY)
            return s.TArrow(normalize_type(ctx, ann), synth_term(ctx.with_var(ann), body))
        case s.TyLam(k, body):
            return s.TForall(k, synth_term(ctx.with_tvar(k), body), t.name)
        case s.App(f, a):
            ft = _as(ctx, synth_term(ctx, f), s.TArrow, "applied term is not a function")
            check_term(ctx, a, ft.dom)
            return ft.cod
        case s.TyApp(f, a):
            ft = _as(ctx, synth_term(ctx, f), s.TForall, "type-applied term is not polymorphic")
            _expect_kind(ctx, a, ft.kind)
            return normalize_type(ctx, s.subst_type(ft.body, a))
        case s.Ite(c, a, b):
            check_term(ctx, c, s.BOOL)
            ty = synth_term(ctx, a)
            check_term(ctx, b, ty)
            return ty
        case s.Pair(a, b):
            return s.TProd(synth_term(ctx, a), synth_term(ctx, b))
        case s.Fst(p) | s.Snd(p):
            pt = _as(ctx, synth_term(ctx, p), s.TProd, "projection from a non-product")
            return pt.left if isinstance(t, s.Fst) else pt.right
        case s.Inl(tgt, a) | s.Inr(tgt, a):
            if tgt is None:
                raise FhaTypeError("cannot infer the sum type of an injection; add [A + B]")
            _expect_kind(ctx, tgt, s.TY)
            st = _as(ctx, tgt, s.TSum, "injection target must be a sum type")
            check_term(ctx, a, st.left if isinstance(t, s.Inl) else st.right)
            return st
        case s.Case(scrut, left, right):
            st = _as(ctx, synth_term(ctx, scrut), s.TSum, "case scrutinee must have a sum type")
            ty = synth_term(ctx.with_var(st.left), left)
            # the left branch type lives under one extra term binder only
            check_term(ctx.with_var(st.right), right, ty)
            return ty
        case s.Absurd(tgt, a):
            _expect_kind(ctx, tgt, s.TY)
            check_term(ctx, a, s.EMPTY)
            return normalize_type(ctx, tgt)
        case s.Thunk() | s.PThunk():
            raise FhaTypeError("cannot infer the type of a thunk here; it needs an expected type")
        case s.Handle(h, c, result):
            hx = resolve_handler(ctx, h, c.mode)
            if result is not None:
                _expect_kind(ctx, result, s.TY)
                check_comp(ctx, c, hx.effect, result, c.mode)
                a = result
            else:
                a = synth_comp(ctx, c, hx.effect, c.mode)
            monad = s.shift_type(hx.monad, 0, len(ctx.tvars))
            return normalize_type(ctx, s.TApp(monad, a))
    raise s.InternalError(f"not a term: {t!r}")


def resolve_handler(ctx: Context, h: s.HandlerLike, mode: Mode) -> s.HandlerExpr:
    if isinstance(h, s.HandlerRef):
        hx = ctx.glob.handlers.get(h.name)
        if hx is None:
            raise FhaTypeError(f"unknown handler {h.name!r}")
        if mode is Mode.PARTIAL and hx.via is None:
            raise FhaTypeError(f"missing via: handler {h.name!r} cannot handle a partial "
                               "computation")
        return hx
    check_handler(Context(ctx.glob), h, h.effect, mode)
    return h


# ---------------------------------------------------------------- comps


def _check_mode(c: s.Comp, mode: Mode) -> None:
    if c.mode is not mode:
        raise FhaTypeError(f"mode violation: {c.mode} computation inside a {mode} one")


def check_comp(ctx: Context, c: s.Comp, effect: str, expected: s.TypeExpr, mode: Mode) -> None:
    """Check computation ``c`` at effect ``effect``, result type ``expected``."""
    if effect not in ctx.glob.effects:
        raise FhaTypeError(f"unknown effect {effect!r}")
    while True:
        _check_mode(c, mode)
        match c:
            case s.Val(t):
                check_term(ctx, t, expected)
                return
            case s.LetIn(bound, body, ann):
                ctx = ctx.with_var(_bound_type(ctx, bound, ann, effect, mode))
                c = body
            case s.Op(p, body, res):
                x = _op_result(c, res, expected)
                _check_op(ctx, p, x, effect, mode)
                ctx.glob.note_op(c, effect)
                ctx, c = ctx.with_var(x), body
            case s.Force(t):
                check_term(ctx, t, s.th_type(mode, effect, expected))
                return
            case s.Fix(body):
                if mode is not Mode.PARTIAL:
                    raise FhaTypeError("fix is only allowed in partial computations")
                ctx, c = ctx.with_var(s.TPTh(effect, expected)), body
            case _:
                raise s.InternalError(f"not a computation: {c!r}")


def _bound_type(ctx, bound, ann, effect, mode):
    if ann is not None:
        _expect_kind(ctx, ann, s.TY)
        check_comp(ctx, bound, effect, ann, mode)
        return ann
    return synth_comp(ctx, bound, effect, mode)


def _op_result(c: s.Op, res, expected):
    if res is not None:
        return res
    if c.body == s.Val(s.Var(0), c.mode) and expected is not None:
        return s.shift_type(expected, 0, 0)
    raise FhaTypeError("cannot infer the result type of op; write op[X]")


def _check_op(ctx, p, x, effect, mode):
    _expect_kind(ctx, x, s.TY)
    check_term(ctx, p, operand_type(ctx, effect, x, mode))


def synth_comp(ctx: Context, c: s.Comp, effect: str, mode: Mode) -> s.TypeExpr:
    """Synthesize the result type of ``c`` (normalized, in ``ctx``'s outer scope).

    Term binders do not bind type variables, so types computed under ``let``
    and ``op`` binders are valid in the enclosing context unchanged.
    """
    if effect not in ctx.glob.effects:
        raise FhaTypeError(f"unknown effect {effect!r}")
    while True:
        _check_mode(c, mode)
        match c:
            case s.Val(t):
                return synth_term(ctx, t)
            case s.LetIn(bound, body, ann):
                ctx = ctx.with_var(_bound_type(ctx, bound, ann, effect, mode))
                c = body
            case s.Op(p, body, res):
                if res is None:
                    raise FhaTypeError("cannot infer the result type of op; write op[X]")
                _check_op(ctx, p, res, effect, mode)
                ctx.glob.note_op(c, effect)
                ctx, c = ctx.with_var(res), body
            case s.Force(t):
                cls = s.TTh if mode is Mode.TOTAL else s.TPTh
                tt = _as(ctx, synth_term(ctx, t), cls,
                         f"force needs a {cls.__name__[1:]} thunk")
                if tt.effect != effect:
                    raise FhaTypeError("effect mismatch in force", effect, tt.effect)
                return tt.arg
            case s.Fix():
                if mode is not Mode.PARTIAL:
                    raise FhaTypeError("fix is only allowed in partial computations")
                raise FhaTypeError("cannot infer the type of fix; use it where the type is known")
            case _:
                raise s.InternalError(f"not a computation: {c!r}")


# ------------------------------------------------------ effects, handlers


def check_effect(decl: s.EffectDecl, glob: Optional[Globals] = None) -> None:
    ctx = Context(glob or Globals())
    _expect_kind(ctx, decl.carrier, s.HTYCO)
    check_term(ctx, decl.hfmap, hfmap_type(decl.carrier))
    check_term(ctx, decl.hmap, hmap_type(decl.carrier))


def check_handler(ctx: Context, h: s.HandlerExpr, effect: str, mode: Mode) -> None:
    """Check a handler literal: the raw monad, its algebra, and the ``via`` condition."""
    glob = ctx.glob
    if effect not in glob.effects:
        raise FhaTypeError(f"unknown effect {effect!r}")
    if h.effect != effect:
        raise FhaTypeError("handler is for a different effect", effect, h.effect)
    top = Context(glob)
    _expect_kind(top, h.monad, s.EFTY)
    carrier = glob.effects[effect].carrier
    fields = handler_field_types(carrier, h.monad)
    for name in ("ret", "bind", "malg"):
        try:
            check_term(top, getattr(h, name), fields[name])
        except FhaTypeError as e:
            raise FhaTypeError(f"handler field {name}: {e.message}", e.expected, e.actual) from None
    if mode is Mode.PARTIAL:
        if h.via is None:
            raise FhaTypeError("missing via: a handler of partial computations needs `via F`")
    if h.via is not None:
        _expect_kind(top, h.via, s.EFTY)
        inner = top.with_tvar(s.TY)
        lhs = normalize_type(inner, s.TApp(s.shift_type(h.monad, 0, 1), s.TVar(0)))
        fa = normalize_type(inner, s.TApp(s.shift_type(h.via, 0, 1), s.TVar(0)))
        if not isinstance(lhs, s.TPTh) or lhs.arg != fa:
            out = lhs.effect if isinstance(lhs, s.TPTh) else "E"
            raise FhaTypeError("via condition fails: M A must equal PTh E (F A)",
                               s.TPTh(out, fa), lhs)


# -------------------------------------------------------------- programs


def _span_of(d) -> Optional[tuple]:
    return getattr(d, "span", None)


def check_decl(glob: Globals, d: s.Decl) -> None:
    ctx = Context(glob)
    match d:
        case s.TypeDef(_, k, body):
            _expect_kind(ctx, body, k)
        case s.EffectDef(decl):
            check_effect(decl, glob)
        case s.TermDef(_, ty, body):
            _expect_kind(ctx, ty, s.TY)
            check_term(ctx, body, ty)
        case s.HandlerDef(_, h):
            check_handler(ctx, h, h.effect, h.mode)
        case s.Main(mode, eff, ty, c):
            if eff not in glob.effects:
                raise FhaTypeError(f"unknown effect {eff!r}")
            if not is_void_like(ctx, eff):
                raise FhaTypeError(f"main must run at an effect without operations; {eff!r} "
                                   "has operations (handle them inside main)")
            _expect_kind(ctx, ty, s.TY)
            check_comp(ctx, c, eff, ty, mode)
        case _:
            raise s.InternalError(f"not a declaration: {d!r}")


_NAMESPACES = {s.TypeDef: "type", s.EffectDef: "effect", s.TermDef: "term",
               s.HandlerDef: "handler", s.Main: "main"}


@deep
def check_program(p: s.Program, prelude: Optional[s.Program] = None,
                  file: str = "<input>") -> Globals:
    """Check every declaration in order; returns the final global table."""
    glob = Globals.of(prelude)
    seen = {(cls, n) for cls, n in ((type(d), d.name) for d in (prelude.decls if prelude else ()))}
    for d in p.decls:
        key = (type(d), d.name)
        if key in seen:
            raise FhaTypeError(f"duplicate {_NAMESPACES[type(d)]} declaration {d.name!r}",
                               span=_span_of(d), file=file)
        seen.add(key)
        try:
            check_decl(glob, d)
        except FhaTypeError as e:
            e.span = e.span or _span_of(d)
            e.file = file
            raise FhaTypeError(f"in {_NAMESPACES[type(d)]} {d.name}: {e.message}", e.expected,
                               e.actual, e.span, file) from None
        glob.add(d)
    return glob
