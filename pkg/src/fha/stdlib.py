"""Prelude and library constructions.

The prelude (``prelude.fha``) declares ``Maybe``, ``VoidH``, ``Exc`` and
``hExc``.  The builders here produce core syntax for the thunk monad, functors
from monads, thunk algebras, coproducts of higher-order functors, generic
algebraic operations, effect rows, and modular handlers.  Rows and modular
handlers are elaborated in Python rather than expressed with kind-level lists.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import syntax as s
from . import checker as ck
from . import templates as tpl
from .syntax import Mode, OpSig

PRELUDE_PATH = Path(__file__).with_name("prelude.fha")


@functools.lru_cache(maxsize=8)
def _load_prelude(path: str) -> s.Program:
    from .parser import parse_program
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), None, file=path)


def prelude_path() -> str:
    return os.environ.get("FHA_PRELUDE") or str(PRELUDE_PATH)


def prelude(path: Optional[str] = None) -> s.Program:
    """The prelude program (``FHA_PRELUDE`` overrides the bundled file)."""
    return _load_prelude(path or prelude_path())


def builtin_prelude() -> s.Program:
    return _load_prelude(str(PRELUDE_PATH))


def effect_decl(name: str, program: Optional[s.Program] = None) -> s.EffectDecl:
    d = (program or builtin_prelude()).lookup(s.EffectDef, name)
    if d is None:
        raise KeyError(name)
    return d.decl


def void_decl() -> s.EffectDecl:
    return effect_decl("VoidH")


def _placeholder_effect(name: str) -> s.EffectDecl:
    return s.EffectDecl(name, s.UNIT, s.UNIT_V, s.UNIT_V)


def _eff(name: str) -> str:
    from .parser import Printer
    return Printer.effect(name)


# ------------------------------------------------------------ monads


@dataclass(frozen=True)
class Monad:
    """A raw monad: a type function with ``ret`` and ``bind`` terms."""
    monad: s.TypeExpr
    ret: s.Term
    bind: s.Term


@dataclass(frozen=True)
class Functor:
    """A raw functor: a type function with its ``fmap``."""
    fn: s.TypeExpr
    fmap: s.Term


def th_mnd(effect: str, mode: Mode = Mode.TOTAL) -> Monad:
    """The monad of thunks ``Th E`` (or ``PTh E``): ret suspends, bind sequences."""
    th, thunk = ("Th", "thunk") if mode is Mode.TOTAL else ("PTh", "pthunk")
    e = _eff(effect)
    effects = [_placeholder_effect(effect)]
    monad = tpl.ty(f"\\(a:Ty). {th} {e} a", effects=effects)
    ret = tpl.tm(f"/\\(a:Ty). \\(x:a). {thunk} val x", effects=effects)
    bind = tpl.tm(f"/\\(a:Ty). /\\(b:Ty). \\(m: {th} {e} a). \\(k: a -> {th} {e} b). "
                  f"{thunk} let y = force m in force (k y)", effects=effects)
    return Monad(monad, ret, bind)


def _ft(monad: s.TypeExpr) -> dict:
    return ck.handler_field_types(s.TLam(s.EFTY, s.TLam(s.TY, s.EMPTY)), monad)


def fct_of_mnd(m: Monad) -> Functor:
    """``fmap f ma = bind ma (\\a. ret (f a))``."""
    fmap = tpl.tm("/\\(a:Ty). /\\(b:Ty). \\(f: a -> b). \\(ma: MM a). "
                  "bnd [a] [b] ma (\\(x:a). rt [b] (f x))",
                  {"MM": m.monad}, {"bnd": (m.bind, _ft(m.monad)["bind"]),
                                    "rt": (m.ret, _ft(m.monad)["ret"])})
    return Functor(m.monad, fmap)


def monad_of(h: s.HandlerExpr) -> Monad:
    return Monad(h.monad, h.ret, h.bind)


def th_alg(decl: s.EffectDecl, mode: Mode = Mode.TOTAL) -> s.HandlerExpr:
    """The thunk algebra of an effect: ``malg o = thunk (op o val)``.

    The partial variant carries ``via (\\a. a)`` since its monad is ``PTh E``.
    """
    m = th_mnd(decl.name, mode)
    th, thunk = ("Th", "thunk") if mode is Mode.TOTAL else ("PTh", "pthunk")
    e = _eff(decl.name)
    effects = [_placeholder_effect(decl.name)]
    malg = tpl.tm(f"/\\(a:Ty). \\(o: HH (\\(b:Ty). {th} {e} b) a). {thunk} op[a] o (x. val x)",
                  {"HH": decl.carrier}, effects=effects)
    via = None if mode is Mode.TOTAL else s.TLam(s.TY, s.TVar(0), "a")
    return s.HandlerExpr(decl.name, m.monad, m.ret, m.bind, malg, via)


# ------------------------------------------------------------ exceptions


@dataclass(frozen=True)
class ExcPackage:
    effect: s.EffectDecl
    handler: s.HandlerExpr

    @staticmethod
    def throw(mode: Mode = Mode.TOTAL, result: Optional[s.TypeExpr] = None) -> s.Comp:
        """``op (inl ()) val``."""
        return s.Op(s.Inl(None, s.UNIT_V), s.Val(s.Var(0), mode), result, mode)

    @staticmethod
    def catch(body: s.Comp, recover: s.Comp, mode: Mode = Mode.TOTAL,
              result: Optional[s.TypeExpr] = None) -> s.Comp:
        """``op (inr (thunk body, thunk recover)) val``."""
        wrap = s.Thunk if mode is Mode.TOTAL else s.PThunk
        payload = s.Inr(None, s.Pair(wrap(body), wrap(recover)))
        return s.Op(payload, s.Val(s.Var(0), mode), result, mode)


def exc_package() -> ExcPackage:
    p = builtin_prelude()
    return ExcPackage(effect_decl("Exc", p), p.lookup(s.HandlerDef, "hExc").handler)


# ------------------------------------------------------------ effect algebra

_FM = "(forall (a:Ty). forall (b:Ty). (a -> b) -> {F} a -> {F} b)"


def coprod_hf(e1: s.EffectDecl, e2: s.EffectDecl, name: Optional[str] = None) -> s.EffectDecl:
    """Coproduct of two higher-order functors; maps split on the sum."""
    name = name or f"{_paren(e1.name)}++{e2.name}"
    types = {"HA": e1.carrier, "HB": e2.carrier}
    terms = {"hfa": (e1.hfmap, ck.hfmap_type(e1.carrier)),
             "hfb": (e2.hfmap, ck.hfmap_type(e2.carrier)),
             "hma": (e1.hmap, ck.hmap_type(e1.carrier)),
             "hmb": (e2.hmap, ck.hmap_type(e2.carrier))}
    carrier = tpl.ty("\\(F:Ty -> Ty). \\(A:Ty). HA F A + HB F A", types)
    hfmap = tpl.tm(
        f"/\\(F:Ty -> Ty). \\(fm: {_FM.format(F='F')}). /\\(a:Ty). /\\(b:Ty). \\(f: a -> b). "
        "\\(o: HA F a + HB F a). "
        "case o { inl x -> inl (hfa [F] fm [a] [b] f x) ; inr y -> inr (hfb [F] fm [a] [b] f y) }",
        types, terms)
    hmap = tpl.tm(
        f"/\\(F:Ty -> Ty). \\(fmF: {_FM.format(F='F')}). /\\(G:Ty -> Ty). \\(fmG: {_FM.format(F='G')}). "
        "\\(sg: forall (a:Ty). F a -> G a). /\\(a:Ty). \\(o: HA F a + HB F a). "
        "case o { inl x -> inl (hma [F] fmF [G] fmG sg [a] x) ; "
        "inr y -> inr (hmb [F] fmF [G] fmG sg [a] y) }",
        types, terms)
    return s.EffectDecl(name, carrier, hfmap, hmap)


def _paren(name: str) -> str:
    return f"({name})" if "++" in name else name


def alg_op_hfun(param: s.TypeExpr, result: s.TypeExpr, name: Optional[str] = None) -> s.EffectDecl:
    """A generic operation ``P ~> A``: carrier ``\\_. \\X. P * (A -> X)``, identity hmap."""
    types = {"PP": param, "AA": result}
    carrier = tpl.ty("\\(F:Ty -> Ty). \\(X:Ty). PP * (AA -> X)", types)
    hfmap = tpl.tm(
        f"/\\(F:Ty -> Ty). \\(fm: {_FM.format(F='F')}). /\\(a:Ty). /\\(b:Ty). \\(f: a -> b). "
        "\\(o: PP * (AA -> a)). (fst o, \\(y:AA). f (snd o y))", types)
    hmap = tpl.tm(
        f"/\\(F:Ty -> Ty). \\(fmF: {_FM.format(F='F')}). /\\(G:Ty -> Ty). \\(fmG: {_FM.format(F='G')}). "
        "\\(sg: forall (a:Ty). F a -> G a). /\\(a:Ty). \\(o: PP * (AA -> a)). o", types)
    return s.EffectDecl(name or "AlgOp", carrier, hfmap, hmap)


def elaborate_row(row: Sequence[OpSig], name: Optional[str] = None) -> s.EffectDecl:
    """Right fold of ``coprod_hf`` over generic operations, with ``VoidH`` as nil."""
    ops = tuple(row)
    acc = void_decl()
    for op in reversed(ops):
        acc = coprod_hf(alg_op_hfun(op.param, op.result), acc, "Row")
    if name is None and not ops:
        return acc
    return s.EffectDecl(name or "Row", acc.carrier, acc.hfmap, acc.hmap, ops)


def op_call(row: Sequence[OpSig], opname: str, arg: s.Term, mode: Mode = Mode.TOTAL) -> s.Comp:
    """``o arg`` for an operation of an elaborated row: inject ``(arg, \\x. x)``."""
    for i, op in enumerate(row):
        if op.name == opname:
            break
    else:
        raise KeyError(opname)
    operand = s.Inl(None, s.Pair(arg, s.Lam(op.result, s.Var(0), "x")))
    for _ in range(i):
        operand = s.Inr(None, operand)
    return s.Op(operand, s.Val(s.Var(0), mode), op.result, mode)


def with_void(h: s.HandlerExpr, decl: s.EffectDecl, name: str) -> s.HandlerExpr:
    """Extend a handler of ``decl`` to ``decl ++ VoidH`` (the right summand is empty)."""
    malg = tpl.tm("/\\(a:Ty). \\(o: HH MM a + Empty). "
                  "case o { inl x -> mlg [a] x ; inr v -> absurd[MM a] v }",
                  {"HH": decl.carrier, "MM": h.monad},
                  {"mlg": (h.malg, ck.handler_field_types(decl.carrier, h.monad)["malg"])})
    return s.HandlerExpr(name, h.monad, h.ret, h.bind, malg, h.via)


# ------------------------------------------------------------ rows, modular handlers


@dataclass(frozen=True)
class EffectRow:
    """A named list of algebraic operations, elaborated to one effect."""
    name: str
    ops: tuple = ()

    def decl(self) -> s.EffectDecl:
        if not self.ops and self.name == "VoidH":
            return void_decl()
        return elaborate_row(self.ops, self.name)

    def effect_def(self) -> s.EffectDef:
        return s.EffectDef(self.decl())

    def call(self, opname: str, arg: s.Term, mode: Mode = Mode.TOTAL) -> s.Comp:
        return op_call(self.ops, opname, arg, mode)

    def concat(self, other: "EffectRow", name: Optional[str] = None) -> "EffectRow":
        if not self.ops:
            return other if name is None else EffectRow(name, other.ops)
        return EffectRow(name or f"{self.name}_{other.name}", self.ops + other.ops)


VOID_ROW = EffectRow("VoidH")


@dataclass(frozen=True)
class ModularHandler:
    """A handler of row ``effect`` producing row ``output``, polymorphic in the ambient row.

    ``alg(input, ambient, out, Mo)`` turns a handler ``Mo`` of the ``out`` row
    (``output ++ ambient``) into one of the ``input`` row (``effect ++ ambient``); ``run(ambient, Mo)``
    is a term of type ``forall A. M A -> Mo.M (res A)``.
    """
    name: str
    effect: tuple
    output: tuple
    res: s.TypeExpr
    alg: Callable[[EffectRow, EffectRow, EffectRow, s.HandlerExpr], s.HandlerExpr]
    run: Callable[[EffectRow, s.HandlerExpr], s.Term]

    def input_row(self, mu: EffectRow, name: Optional[str] = None) -> EffectRow:
        return EffectRow(self.name, self.effect).concat(mu, name)

    def output_row(self, mu: EffectRow, name: Optional[str] = None) -> EffectRow:
        return EffectRow(f"{self.name}Out", self.output).concat(mu, name)


def modular_handle(h: ModularHandler, c: s.Comp, mu: EffectRow, result: s.TypeExpr,
                   input_row: Optional[EffectRow] = None,
                   output_row: Optional[EffectRow] = None) -> s.Comp:
    """``force (run [A] (handle (alg T) c))`` with ``T`` the thunk algebra of the output row.

    The returned computation runs at the output row and has type ``res A``.
    """
    inp = input_row or h.input_row(mu)
    out = output_row or h.output_row(mu)
    t = th_alg(out.decl())
    alg = h.alg(inp, mu, out, t)
    run = h.run(mu, t)
    return s.Force(s.App(s.TyApp(run, result), s.Handle(alg, c, result)))


def _lift_env(inp: EffectRow, mu: EffectRow, out: EffectRow, mo: s.HandlerExpr):
    mo_carrier = out.decl().carrier
    types = {"MoM": mo.monad, "CIN": inp.decl().carrier}
    out = ck.handler_field_types(mo_carrier, mo.monad)
    terms = {"moret": (mo.ret, out["ret"]), "mobind": (mo.bind, out["bind"]),
             "momalg": (mo.malg, out["malg"]),
             "hfmu": (mu.decl().hfmap, ck.hfmap_type(mu.decl().carrier)),
             "fmmo": (fct_of_mnd(monad_of(mo)).fmap, ck.fmap_ty(mo.monad))}
    return types, terms


def exception_modular(name: str = "Raise") -> ModularHandler:
    """Modular exceptions: ``raise : Unit ~> Empty`` handled into ``Maybe``.

    Operations of the ambient row are forwarded to ``Mo`` after mapping the
    continuation result through ``inr``.
    """
    maybe = s.TLam(s.TY, s.TSum(s.UNIT, s.TVar(0)), "a")

    def alg(inp: EffectRow, mu: EffectRow, out: EffectRow,
            mo: s.HandlerExpr) -> s.HandlerExpr:
        types, terms = _lift_env(inp, mu, out, mo)
        monad = tpl.ty("\\(a:Ty). MoM (Unit + a)", types)
        ret = tpl.tm("/\\(a:Ty). \\(x:a). moret [Unit + a] (inr x)", types, terms)
        bind = tpl.tm(
            "/\\(a:Ty). /\\(b:Ty). \\(m: MoM (Unit + a)). \\(k: a -> MoM (Unit + b)). "
            "mobind [Unit + a] [Unit + b] m "
            "(\\(r: Unit + a). case r { inl u -> moret [Unit + b] (inl u) ; inr y -> k y })",
            types, terms)
        malg = tpl.tm(
            "/\\(a:Ty). \\(o: CIN (\\(b:Ty). MoM (Unit + b)) a). "
            "case o { inl p -> moret [Unit + a] (inl ()) ; "
            "inr q -> momalg [Unit + a] (hfmu [MoM] fmmo [a] [Unit + a] (\\(x:a). inr x) q) }",
            types, terms)
        return s.HandlerExpr(inp.name, monad, ret, bind, malg)

    def run(mu: EffectRow, mo: s.HandlerExpr) -> s.Term:
        return tpl.tm("/\\(a:Ty). \\(m: MoM (Unit + a)). m", {"MoM": mo.monad})

    return ModularHandler(name, (OpSig("raise", s.UNIT, s.EMPTY),), (), maybe, alg, run)


def state_modular(state: s.TypeExpr, initial: s.Term, name: str = "State") -> ModularHandler:
    """Modular state: ``get : Unit ~> S`` and ``put : S ~> Unit``, run from ``initial``.

    The result type function is ``\\a. a * S``.
    """
    res = s.TLam(s.TY, s.TProd(s.TVar(0), s.shift_type(state, 0, 1)), "a")

    def alg(inp: EffectRow, mu: EffectRow, out: EffectRow,
            mo: s.HandlerExpr) -> s.HandlerExpr:
        types, terms = _lift_env(inp, mu, out, mo)
        types["SS"] = state
        monad = tpl.ty("\\(a:Ty). SS -> MoM (a * SS)", types)
        ret = tpl.tm("/\\(a:Ty). \\(x:a). \\(s:SS). moret [a * SS] (x, s)", types, terms)
        bind = tpl.tm(
            "/\\(a:Ty). /\\(b:Ty). \\(m: SS -> MoM (a * SS)). \\(k: a -> SS -> MoM (b * SS)). "
            "\\(s:SS). mobind [a * SS] [b * SS] (m s) (\\(p: a * SS). k (fst p) (snd p))",
            types, terms)
        malg = tpl.tm(
            "/\\(a:Ty). \\(o: CIN (\\(b:Ty). SS -> MoM (b * SS)) a). "
            "case o { inl g -> \\(s:SS). moret [a * SS] (snd g s, s) ; "
            "inr r -> case r { inl p -> \\(s:SS). moret [a * SS] (snd p (), fst p) ; "
            "inr q -> \\(s:SS). momalg [a * SS] "
            "(hfmu [MoM] fmmo [a] [a * SS] (\\(x:a). (x, s)) q) } }",
            types, terms)
        return s.HandlerExpr(inp.name, monad, ret, bind, malg)

    def run(mu: EffectRow, mo: s.HandlerExpr) -> s.Term:
        return tpl.tm("/\\(a:Ty). \\(m: SS -> MoM (a * SS)). m s0",
                      {"MoM": mo.monad, "SS": state}, {"s0": initial})

    ops = (OpSig("get", s.UNIT, state), OpSig("put", state, s.UNIT))
    return ModularHandler(name, ops, (), res, alg, run)
