"""The acceptance suite: one oracle check per metatheorem-derived criterion.

``run_all`` returns a :class:`CriterionResult` per criterion; ``fha selftest``
prints them as a table and ``tests/test_acceptance.py`` asserts them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from . import checker as ck
from . import evaluator as ev
from . import extract as ex
from . import lam as L
from . import laws
from . import parser
from . import scenarios
from . import stdlib
from . import syntax as s
from .gen import Gen, gen_base
from .syntax import Mode

DEFAULT_FUEL = 1_000_000
DEFAULT_BUDGET = 1_000_000
GENERATED = 500
LAW_COUNT = 100
FREE_THEOREM_COUNT = 20


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = field(default=0.0, compare=False)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


@dataclass(frozen=True)
class Run:
    """One corpus program pushed through both backends."""
    name: str
    expected: Optional[str]
    is_bool: bool
    total: bool
    evaluated: str
    decoded: str
    hand_written: bool


# ------------------------------------------------------------ shared corpus


def _render_decoded(v) -> str:
    return "unknown" if isinstance(v, ex.Unknown) else ev.render(v)


def run_both(name: str, prog: s.Program, context: s.Program, expected: Optional[str] = None,
             hand: bool = True, fuel: int = DEFAULT_FUEL, budget: int = DEFAULT_BUDGET) -> Run:
    glob = ck.check_program(prog, context)
    main = prog.main
    outcome = ev.render_outcome(ev.run_program(prog, fuel, context))
    lam = ex.extract_program(prog, context, glob)
    decoded = _render_decoded(ex.decode_value(lam, main.type, glob, budget))
    ty = ck.normalize_type(ck.Context(glob), main.type)
    return Run(name, expected, ty == s.BOOL, main.mode is Mode.TOTAL, outcome, decoded, hand)


@lru_cache(maxsize=None)
def generator_context() -> s.Program:
    pre = stdlib.builtin_prelude()
    return s.Program(tuple(pre.decls) + tuple(gen_base(pre).decls))


def generated_programs(count: int = GENERATED, seed: int = 0) -> list[tuple[str, s.Program]]:
    """``count`` closed total boolean programs at generator depths 4 and 5."""
    out = []
    for i in range(count):
        g = Gen.seeded(seed * 100_003 + i, 4 + i % 2)
        out.append((f"gen{i}", g.program(s.Program(()))))
    return out


@lru_cache(maxsize=4)
def corpus_runs(generated: int = GENERATED) -> tuple[Run, ...]:
    pre = stdlib.builtin_prelude()
    runs = [run_both(sc.name, sc.program, pre, sc.expected or None)
            for sc in scenarios.hand_written(pre)]
    ctx = generator_context()
    runs += [run_both(n, p, ctx, None, hand=False) for n, p in generated_programs(generated)]
    return tuple(runs)


def _boolean_total(runs) -> list[Run]:
    return [r for r in runs if r.is_bool and r.total]


# ------------------------------------------------------------ criteria


def consistency() -> tuple[bool, str]:
    t = L.normalize(ex.extract_term(s.TT))
    f = L.normalize(ex.extract_term(s.FF))
    ok = t != f and t == ex.TRUE and f == ex.FALSE
    return ok, f"tt ~> {L.print_lam(t)}, ff ~> {L.print_lam(f)}"


def canonicity(generated: int = GENERATED) -> tuple[bool, str]:
    t0 = time.perf_counter()
    runs = _boolean_total(corpus_runs(generated))
    elapsed = time.perf_counter() - t0
    hand = [r for r in runs if r.hand_written]
    gen = [r for r in runs if not r.hand_written]
    bad = [r for r in runs if r.evaluated not in ("tt", "ff")]
    stuck = [r for r in runs if r.evaluated.startswith("stuck")]
    wrong = [r for r in hand if r.expected and r.evaluated != r.expected]
    ok = (len(hand) >= 50 and len(gen) >= min(500, generated) and not bad and not wrong
          and elapsed < 60)
    detail = (f"{len(hand)} hand-written + {len(gen)} generated, {len(bad)} not a boolean, "
              f"{len(stuck)} stuck, {len(wrong)} off golden")
    if bad or wrong:
        r = (bad + wrong)[0]
        detail += f"; first: {r.name} gave {r.evaluated}"
    return ok, detail


def extraction(generated: int = GENERATED) -> tuple[bool, str]:
    runs = _boolean_total(corpus_runs(generated))
    bad = [r for r in runs if r.decoded not in ("tt", "ff")]
    detail = f"{len(runs) - len(bad)}/{len(runs)} decode to a Church boolean"
    if bad:
        detail += f"; first: {bad[0].name} gave {bad[0].decoded}"
    return not bad and bool(runs), detail


def adequacy(generated: int = GENERATED) -> tuple[bool, str]:
    runs = [r for r in corpus_runs(generated) if not r.evaluated.startswith("timeout")]
    bad = [r for r in runs if r.evaluated != r.decoded]
    detail = f"{len(runs) - len(bad)}/{len(runs)} terminating programs agree"
    if bad:
        detail += f"; first: {bad[0].name} evaluates to {bad[0].evaluated}, decodes to {bad[0].decoded}"
    return not bad and bool(runs), detail


def equations(count: int = LAW_COUNT) -> tuple[bool, str]:
    ctx = laws.law_context(stdlib.builtin_prelude())
    parts, failures = [], []
    for schema in laws.SCHEMAS:
        rs = laws.run_schema(schema, count, context=ctx)
        good = sum(r.ok for r in rs)
        parts.append(f"{schema} {good}/{len(rs)}")
        failures += [r for r in rs if not r.ok]
    detail = ", ".join(parts)
    if failures:
        r = failures[0]
        detail += f"; first failure {r.instance.schema}: {r.eval_lhs} vs {r.eval_rhs} {r.detail}"
    return not failures, detail


GOLDENS = (("exc_throw", "inl ()"), ("exc_catch", "inr ff"), ("exc_catch_val", "inr tt"))


def goldens() -> tuple[bool, str]:
    pre = stdlib.builtin_prelude()
    ok, parts = True, []
    for name, want in GOLDENS:
        prog = parser.parse_program(scenarios.corpus_source(name), pre, f"{name}.fha")
        r = run_both(name, prog, pre)
        ok &= r.evaluated == want and r.decoded == want
        parts.append(f"{name} {r.evaluated}/{r.decoded}")
    return ok, ", ".join(parts)


DIVERGE_SOURCE = "main[partial] VoidH : Bool = fix (self. force self)"
DIVERGE_FUELS = (100, 10_000, 1_000_000)


def recursion() -> tuple[bool, str]:
    pre = stdlib.builtin_prelude()
    prog = parser.parse_program(scenarios.corpus_source("countdown"), pre, "countdown.fha")
    r = run_both("countdown", prog, pre, fuel=10_000, budget=10_000)
    ok = r.evaluated == "tt" and r.decoded == "tt"
    parts = [f"countdown {r.evaluated}/{r.decoded} at 10^4"]
    loop = parser.parse_program(DIVERGE_SOURCE, pre)
    glob = ck.check_program(loop, pre)
    lam = ex.extract_program(loop, pre, glob)
    for fuel in DIVERGE_FUELS:
        out = ev.render_outcome(ev.run_program(loop, fuel, pre))
        try:
            L.normalize(lam, fuel)
            lam_out = "normal form"
        except L.BudgetExceeded:
            lam_out = "budget exceeded"
        ok &= out == f"timeout({fuel})" and lam_out == "budget exceeded"
        parts.append(f"fix(self. force self) {out}/{lam_out}")
    return ok, ", ".join(parts)


def hdl_let_absent() -> tuple[bool, str]:
    pre = stdlib.builtin_prelude()
    prog = parser.parse_program(scenarios.corpus_source("hdl_let"), pre, "hdl_let.fha")
    glob = ck.check_program(prog, pre)
    out = ev.run_program(prog, DEFAULT_FUEL, pre)
    lam = ex.extract_program(prog, pre, glob)
    dec = ex.decode_value(lam, prog.main.type, glob)
    ok = (isinstance(out, ev.Done) and isinstance(out.value, ev.VPair)
          and out.value.first != out.value.second and ev.render(out.value) == _render_decoded(dec))
    return ok, f"hdl h (let ...) vs bind split: {ev.render_outcome(out)} (extracted {_render_decoded(dec)})"


def id_inhabitants(count: int = FREE_THEOREM_COUNT, seed: int = 0) -> list[s.Term]:
    """``count`` structurally distinct generated terms of ``forall a. a -> a``."""
    seen: list[s.Term] = []
    i = 0
    while len(seen) < count and i < 100 * count:
        t = Gen.seeded(seed * 7919 + i, 3).id_inhabitant(2 + i % 3)
        i += 1
        if t not in seen:
            seen.append(t)
    return seen


POLY_ID_TYPE = s.TForall(s.TY, s.TArrow(s.TVar(0), s.TVar(0)), "a")


def free_theorem(count: int = FREE_THEOREM_COUNT) -> tuple[bool, str]:
    pre = generator_context()
    terms = id_inhabitants(count)
    bad = []
    for i, t in enumerate(terms):
        prog = s.Program((s.TermDef("t", POLY_ID_TYPE, t),))
        try:
            ck.check_program(prog, pre)
        except ck.FhaTypeError as err:
            bad.append(f"#{i} ill-typed: {err}")
            continue
        e = ev.Evaluator(pre, ev.Fuel(DEFAULT_FUEL))
        e.load(prog)
        for b, want in ((ev.TT, "tt"), (ev.FF, "ff")):
            got = ev.render(e.apply(e.inst(e.const("t")), b))
            if got != want:
                bad.append(f"#{i} t [Bool] {want} = {got}")
    ok = len(terms) == count and not bad
    detail = f"{len(terms)} distinct inhabitants, {len(bad)} counterexamples"
    return ok, detail + (f"; first: {bad[0]}" if bad else "")


CRITERIA: tuple[tuple[int, str, Callable[[], tuple[bool, str]]], ...] = (
    (1, "consistency", consistency),
    (2, "canonicity", canonicity),
    (3, "extraction", extraction),
    (4, "adequacy", adequacy),
    (5, "equation schemas", equations),
    (6, "exception goldens", goldens),
    (7, "recursion", recursion),
    (8, "hdl-let absence", hdl_let_absent),
    (9, "free theorem", free_theorem),
)


def run_criterion(number: int) -> CriterionResult:
    _, name, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as err:  # a crash is a failure, reported with its message
        ok, detail = False, f"error: {type(err).__name__}: {err}"
    return CriterionResult(number, name, ok, detail, time.perf_counter() - t0)


def run_all() -> list[CriterionResult]:
    return [run_criterion(n) for n, _, _ in CRITERIA]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)
