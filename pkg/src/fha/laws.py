"""Random instances of the computation equations, checked in both backends.

Each instance is a pair of closed sides at one effect.  The evaluator must give
both the same first-order observation, and their extractions must be
beta-convertible.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional, Union

from . import checker as ck
from . import evaluator as ev
from . import extract as ex
from . import lam as L
from . import stdlib
from . import syntax as s
from .gen import Gen
from .syntax import Mode
from .templates import annotate

SCHEMAS = ("val-let", "let-val", "let-assoc", "let-op", "hdl-val", "hdl-op", "fix")


@dataclass(frozen=True)
class LawInstance:
    """``lhs`` and ``rhs`` are computations at ``effect`` (or terms when ``is_term``)."""
    schema: str
    effect: str
    type: s.TypeExpr
    lhs: Union[s.Comp, s.Term]
    rhs: Union[s.Comp, s.Term]
    is_term: bool = False
    mode: Mode = Mode.TOTAL
    handler: Optional[str] = None


@dataclass(frozen=True)
class LawResult:
    instance: LawInstance
    eval_lhs: str
    eval_rhs: str
    extract_ok: bool
    detail: str = ""

    @property
    def eval_ok(self) -> bool:
        return self.eval_lhs == self.eval_rhs and not self.eval_lhs.startswith(("stuck", "timeout"))

    @property
    def ok(self) -> bool:
        return self.eval_ok and self.extract_ok


# ------------------------------------------------------------ instances


def _first_order(g: Gen) -> s.TypeExpr:
    return g.type(2, arrows=False)


def _effect(g: Gen, with_ops: bool = False) -> str:
    return g.rng.choice(["Exc", "St"] if with_ops else ["VoidH", "Exc", "St"])


def make_instance(schema: str, g: Gen, glob: ck.Globals) -> LawInstance:
    d = max(1, g.depth - 1)
    if schema == "val-let":
        e, a, ty = _effect(g), g.type(1), _first_order(g)
        v = g.term(a, (), d)
        k = g.comp(e, ty, (a,), d)
        # the annotation keeps v checkable wherever the variable stood
        return LawInstance(schema, e, ty, s.LetIn(s.Val(v), k, a),
                           s.substitute(k, annotate(v, a), 0))
    if schema == "let-val":
        e, ty = _effect(g), _first_order(g)
        m = g.comp(e, ty, (), d)
        return LawInstance(schema, e, ty, s.LetIn(m, s.Val(s.Var(0)), ty), m)
    if schema == "let-assoc":
        e, a, b, ty = _effect(g), _first_order(g), _first_order(g), _first_order(g)
        m1, m2, m3 = g.comp(e, a, (), d), g.comp(e, b, (a,), d), g.comp(e, ty, (b,), d)
        lhs = s.LetIn(s.LetIn(m1, m2, a), m3, b)
        rhs = s.LetIn(m1, s.LetIn(m2, s.shift(m3, 1, 1), b), a)
        return LawInstance(schema, e, ty, lhs, rhs)
    if schema == "let-op":
        e = _effect(g, with_ops=True)
        p, x = g.operand(e, (), d)
        a, ty = _first_order(g), _first_order(g)
        k, k2 = g.comp(e, a, (x,), d), g.comp(e, ty, (a,), d)
        lhs = s.LetIn(s.Op(p, k, x), k2, a)
        rhs = s.Op(p, s.LetIn(k, s.shift(k2, 1, 1), a), x)
        return LawInstance(schema, e, ty, lhs, rhs)
    if schema == "hdl-val":
        e = _effect(g, with_ops=True)
        h = stdlib_handler(e, glob)
        a = _first_order(g)
        v = g.term(a, (), d)
        lhs = s.Handle(s.HandlerRef(h), s.Val(v), a)
        hx = glob.handlers[h]
        ret = annotate(hx.ret, ck.handler_field_types(glob.effects[e].carrier, hx.monad)["ret"])
        rhs = s.App(s.TyApp(ret, a), v)
        return LawInstance(schema, e, s.TApp(hx.monad, a), lhs, rhs, True, handler=h)
    if schema == "hdl-op":
        e = _effect(g, with_ops=True)
        h = stdlib_handler(e, glob)
        p, x = g.operand(e, (), d)
        a = _first_order(g)
        k = g.comp(e, a, (x,), d)
        lhs = s.Handle(s.HandlerRef(h), s.Op(p, k, x), a)
        rhs = hdl_op_rhs(glob, h, p, x, k, a)
        return LawInstance(schema, e, s.TApp(glob.handlers[h].monad, a), lhs, rhs, True,
                           handler=h)
    if schema == "fix":
        return fix_instance(g, d)
    raise ValueError(f"unknown schema {schema!r}")


def stdlib_handler(effect: str, glob: Optional[ck.Globals] = None) -> str:
    return {"Exc": "hExc", "St": "hSt"}[effect]


def hdl_op_rhs(glob: ck.Globals, h: str, p: s.Term, x: s.TypeExpr, k: s.Comp,
               a: s.TypeExpr) -> s.Term:
    """``bind (malg (hmap T fmT M fmM sigma p)) (\\x. hdl h k)`` as a core term."""
    hx = glob.handlers[h]
    decl = glob.effects[hx.effect]
    fields = ck.handler_field_types(decl.carrier, hx.monad)
    bind = annotate(hx.bind, fields["bind"])
    malg = annotate(hx.malg, fields["malg"])
    hmap = annotate(decl.hmap, ck.hmap_type(decl.carrier))
    th = s.TLam(s.TY, s.TTh(hx.effect, s.TVar(0)), "b")
    fm_t = stdlib.fct_of_mnd(stdlib.th_mnd(hx.effect)).fmap
    fm_m = stdlib.fct_of_mnd(stdlib.monad_of(hx)).fmap
    ref = s.HandlerRef(h)
    sigma = s.TyLam(s.TY, s.Lam(s.TTh(hx.effect, s.TVar(0)),
                                s.Handle(ref, s.Force(s.Var(0)), s.TVar(0)), "c"), "b")
    mapped = s.App(s.TyApp(s.App(s.App(s.TyApp(s.App(s.TyApp(hmap, th), fm_t), hx.monad), fm_m),
                                 sigma), x), p)
    return s.App(s.App(s.TyApp(s.TyApp(bind, x), a), s.App(s.TyApp(malg, x), mapped)),
                 s.Lam(x, s.Handle(ref, k, a), "x"))


def fix_instance(g: Gen, d: int) -> LawInstance:
    """``fix (self. c)`` against ``c[self := pthunk (fix (self. c))]`` inside a loop.

    The loop counts a pair of booleans up in binary and returns a random
    boolean once both are set, so both sides terminate.
    """
    pp = s.TProd(s.BOOL, s.BOOL)
    loop_ty = s.TArrow(pp, s.TPTh("VoidH", s.BOOL))
    result = g.term(s.BOOL, (), d) if g.chance(0.8) else s.TT
    # under: self (1), n (0)
    n = s.Var(0)
    succ = s.Pair(s.Ite(s.Snd(n), s.Ite(s.Fst(n), s.FF, s.TT), s.Fst(n)),
                  s.Ite(s.Snd(n), s.FF, s.TT))
    done = s.Ite(s.Fst(n), s.Snd(n), s.FF)
    if g.chance(0.25):
        step = s.PThunk(s.Val(s.shift(result, 0, 2), Mode.PARTIAL))  # self unused
    else:
        step = s.PThunk(s.LetIn(s.Force(s.Var(1), Mode.PARTIAL),
                                s.Force(s.App(s.Var(0), s.shift(succ, 0, 1)), Mode.PARTIAL),
                                loop_ty, Mode.PARTIAL, "f"))
    body = s.Val(s.Lam(pp, s.Ite(done, s.PThunk(s.Val(s.shift(result, 0, 2), Mode.PARTIAL)),
                                 step), "n"), Mode.PARTIAL)
    fix = s.Fix(body, Mode.PARTIAL, "self")
    unfolded = s.substitute(body, s.PThunk(fix), 0)
    start = s.Pair(g.rng.choice([s.TT, s.FF]), g.rng.choice([s.TT, s.FF]))

    def wrap(c):
        return s.LetIn(c, s.Force(s.App(s.Var(0), start), Mode.PARTIAL), loop_ty, Mode.PARTIAL,
                       "loop")

    return LawInstance("fix", "VoidH", s.BOOL, wrap(fix), wrap(unfolded), mode=Mode.PARTIAL)


# ------------------------------------------------------------ checking


def _program(inst: LawInstance) -> s.Program:
    if inst.is_term:
        ty = inst.type
        return s.Program((s.TermDef("lhs", ty, inst.lhs), s.TermDef("rhs", ty, inst.rhs)))
    wrap = s.Thunk if inst.mode is Mode.TOTAL else s.PThunk
    ty = s.th_type(inst.mode, inst.effect, inst.type)
    return s.Program((s.TermDef("lhs", ty, wrap(inst.lhs)), s.TermDef("rhs", ty, wrap(inst.rhs))))


def observe(inst: LawInstance, context: s.Program, program: s.Program, side: str,
            fuel: int = 1_000_000) -> str:
    """Evaluate one side to a rendered first-order observation."""
    f = ev.Fuel(fuel)
    e = ev.Evaluator(context, f)
    e.load(program)

    def go() -> ev.Value:
        v = e.const(side)
        if not inst.is_term:
            nf = e.force(v)
            if inst.effect == "VoidH":
                if isinstance(nf, ev.NOp):
                    raise ev.StuckError("operation at VoidH")
                return nf.value
            v = e.fold(e.handler_value(s.HandlerRef(stdlib_handler(inst.effect))), nf)
        if inst.effect == "St":
            v = e.apply(v, ev.TT)
        return v

    try:
        return ev.render(go())
    except ev.OutOfFuel:
        return f"timeout({f.spent})"
    except ev.StuckError as err:
        return f"stuck: {err}"


def check_instance(inst: LawInstance, context: s.Program, lam_budget: int = 1_000_000,
                   fuel: int = 1_000_000) -> LawResult:
    """Check that a law instance holds in both backends.

    ``context`` is the prelude plus the generator base declarations.
    """
    prog = _program(inst)
    try:
        glob = ck.check_program(prog, context)
    except ck.FhaTypeError as err:
        return LawResult(inst, "ill-typed", "ill-typed", False, str(err))
    lhs = observe(inst, context, prog, "lhs", fuel)
    rhs = observe(inst, context, prog, "rhs", fuel)
    exl = ex.extract_term(s.Const("lhs"), glob, prog, context)
    exr = ex.extract_term(s.Const("rhs"), glob, prog, context)
    try:
        conv = L.convertible(exl, exr, lam_budget)
        detail = "" if conv else "extracted sides differ"
    except L.BudgetExceeded as err:
        conv, detail = False, str(err)
    return LawResult(inst, lhs, rhs, conv, detail)


def law_context(prelude: Optional[s.Program] = None) -> s.Program:
    from .gen import gen_base
    pre = prelude or stdlib.builtin_prelude()
    return s.Program(tuple(pre.decls) + tuple(gen_base(pre).decls))


def run_schema(schema: str, count: int, seed: int = 0, context: Optional[s.Program] = None,
               depth: int = 3) -> list[LawResult]:
    context = context or law_context()
    glob = ck.Globals.of(context)
    out = []
    for i in range(count):
        g = Gen.seeded(zlib.crc32(f"{schema}/{seed}/{i}".encode()), depth)
        out.append(check_instance(make_instance(schema, g, glob), context))
    return out
